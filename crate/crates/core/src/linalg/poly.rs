//! Multivariate polynomials over a prime field and fraction-free (Bareiss)
//! rank over the rational function field `GF(p)(t_1, ..., t_s)`.
//!
//! A monomial is packed into a `u64`: the top byte holds the total degree and
//! byte `6 - i` holds the exponent of `t_i`, so integer order on the packed
//! words is graded lexicographic order and monomial multiplication is a plain
//! integer addition.

use std::sync::Arc;

use super::dense::DenseMatrix;
use super::gf::{Elem, FieldContext};
use crate::error::{Error, Result};

pub const MAX_VARS: usize = 7;
pub const DEFAULT_DEGREE_CAP: u32 = 64;
/// Products of two capped entries must still fit the 8-bit degree byte.
pub const MAX_DEGREE_CAP: u32 = 127;
pub const DEFAULT_WORK_BUDGET: u64 = 1 << 31;

const DEGREE_SHIFT: u32 = 56;

#[inline]
fn var_shift(i: usize) -> u32 {
    48 - 8 * i as u32
}

#[inline]
fn mono_degree(m: u64) -> u32 {
    (m >> DEGREE_SHIFT) as u32
}

#[inline]
fn mono_divides(a: u64, b: u64) -> bool {
    (0..8).all(|k| (a >> (8 * k)) & 0xff <= (b >> (8 * k)) & 0xff)
}

/// Polynomial with prime-field coefficients; terms are stored in strictly
/// decreasing monomial order with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(u64, Elem)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Elem) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Poly { terms: vec![(0, c)] }
        }
    }

    /// The variable `t_i` (0-based).
    pub fn var(i: usize) -> Result<Self> {
        if i >= MAX_VARS {
            return Err(Error::invalid(format!("at most {MAX_VARS} variables")));
        }
        Ok(Poly {
            terms: vec![(1 << DEGREE_SHIFT | 1 << var_shift(i), 1)],
        })
    }

    /// Builds `c * t^exponents`.
    pub fn monomial(c: Elem, exponents: &[u32]) -> Result<Self> {
        if exponents.len() > MAX_VARS {
            return Err(Error::invalid(format!("at most {MAX_VARS} variables")));
        }
        let total: u32 = exponents.iter().sum();
        if total > 255 {
            return Err(Error::invalid("monomial degree above 255"));
        }
        let mut m = (total as u64) << DEGREE_SHIFT;
        for (i, &e) in exponents.iter().enumerate() {
            m |= (e as u64) << var_shift(i);
        }
        Ok(if c == 0 {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|&(m, _)| m == 0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |&(m, _)| mono_degree(m))
    }

    /// Terms as `(exponents, coefficient)` in decreasing graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = ([u32; MAX_VARS], Elem)> + '_ {
        self.terms.iter().map(|&(m, c)| {
            let mut e = [0u32; MAX_VARS];
            for (i, x) in e.iter_mut().enumerate() {
                *x = ((m >> var_shift(i)) & 0xff) as u32;
            }
            (e, c)
        })
    }

    fn combine(&self, other: &Poly, f: &FieldContext, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: Elem| if negate { f.neg(c) } else { c };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, sign(b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = f.add(a[i].1, sign(b[j].1));
                    if c != 0 {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(m, c)| (m, sign(c))));
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly, f: &FieldContext) -> Poly {
        self.combine(other, f, false)
    }

    pub fn sub(&self, other: &Poly, f: &FieldContext) -> Poly {
        self.combine(other, f, true)
    }

    pub fn scale(&self, c: Elem, f: &FieldContext) -> Poly {
        if c == 0 {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|&(m, x)| (m, f.mul(x, c))).collect(),
        }
    }

    fn mul_term(&self, mono: u64, c: Elem, f: &FieldContext) -> Poly {
        Poly {
            terms: self.terms.iter().map(|&(m, x)| (m + mono, f.mul(x, c))).collect(),
        }
    }

    pub fn mul(&self, other: &Poly, f: &FieldContext) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms[0];
            return self.mul_term(m, c, f);
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            return other.mul_term(m, c, f);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                prods.push((ma + mb, f.mul(ca, cb)));
            }
        }
        prods.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        let mut out: Vec<(u64, Elem)> = Vec::with_capacity(prods.len());
        for (m, c) in prods {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = f.add(last.1, c),
                _ => {
                    if out.last().is_some_and(|l| l.1 == 0) {
                        out.pop();
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|l| l.1 == 0) {
            out.pop();
        }
        Poly { terms: out }
    }

    /// Exact quotient `self / d`; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly, f: &FieldContext) -> Option<Poly> {
        let &(lm, lc) = d.terms.first()?;
        let inv = f.inv_nonzero(lc);
        if d.terms.len() == 1 && lm == 0 {
            return Some(self.scale(inv, f));
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some(&(m, c)) = rem.terms.first() {
            if !mono_divides(lm, m) {
                return None;
            }
            let (qm, qc) = (m - lm, f.mul(c, inv));
            quot.push((qm, qc));
            rem = rem.sub(&d.mul_term(qm, qc, f), f);
        }
        Some(Poly { terms: quot })
    }

    /// Value at `point`, whose coordinates live in `ext` (an extension of the
    /// coefficient field, or the field itself).
    pub fn evaluate(&self, point: &[Elem], ext: &FieldContext) -> Elem {
        let mut acc = 0;
        for (e, c) in self.terms() {
            let mut v = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    v = ext.mul(v, ext.pow(point.get(i).copied().unwrap_or(0), k as u64));
                }
            }
            acc = ext.add(acc, v);
        }
        acc
    }
}

/// Rank of a polynomial matrix together with the rows and columns of a
/// generically nonsingular maximal minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericRank {
    pub rank: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Term multiplications spent.
    pub work: u64,
}

#[derive(Clone, Debug)]
pub struct PolyMatrix {
    field: Arc<FieldContext>,
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
    degree_cap: u32,
}

impl PolyMatrix {
    pub fn zeros(field: Arc<FieldContext>, nvars: usize, rows: usize, cols: usize) -> Result<Self> {
        if !field.is_prime_field() {
            return Err(Error::invalid("polynomial matrices take prime-field coefficients"));
        }
        if nvars > MAX_VARS {
            return Err(Error::invalid(format!("at most {MAX_VARS} variables")));
        }
        Ok(PolyMatrix {
            field,
            nvars,
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
            degree_cap: DEFAULT_DEGREE_CAP,
        })
    }

    pub fn from_dense(m: &DenseMatrix, nvars: usize) -> Result<Self> {
        let mut out = Self::zeros(m.field().clone(), nvars, m.rows(), m.cols())?;
        for (slot, &x) in out.entries.iter_mut().zip(m.data()) {
            *slot = Poly::constant(x);
        }
        Ok(out)
    }

    /// `base + Σ t_var * m` over the listed `(var, m)` pairs.
    pub fn pencil(base: &DenseMatrix, nvars: usize, terms: &[(usize, &DenseMatrix)]) -> Result<Self> {
        let mut out = Self::from_dense(base, nvars)?;
        let f = out.field.clone();
        for &(var, m) in terms {
            if var >= nvars {
                return Err(Error::invalid(format!("variable index {var} >= {nvars}")));
            }
            if m.rows() != base.rows() || m.cols() != base.cols() {
                return Err(Error::DimensionMismatch("pencil terms".into()));
            }
            let t = Poly::var(var)?;
            for (slot, &x) in out.entries.iter_mut().zip(m.data()) {
                if x != 0 {
                    *slot = slot.add(&t.scale(x, &f), &f);
                }
            }
        }
        Ok(out)
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Result<Self> {
        if cap == 0 || cap > MAX_DEGREE_CAP {
            return Err(Error::invalid(format!("degree cap must lie in 1..={MAX_DEGREE_CAP}")));
        }
        self.check_cap()?;
        self.degree_cap = cap;
        Ok(self)
    }

    fn check_cap(&self) -> Result<()> {
        match self.entries.iter().map(Poly::degree).max() {
            Some(d) if d > self.degree_cap => Err(Error::DegreeCapExceeded {
                degree: d,
                cap: self.degree_cap,
            }),
            _ => Ok(()),
        }
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) -> Result<()> {
        if v.degree() > self.degree_cap {
            return Err(Error::DegreeCapExceeded {
                degree: v.degree(),
                cap: self.degree_cap,
            });
        }
        self.entries[i * self.cols + j] = v;
        Ok(())
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.nvars.max(other.nvars), self.rows, other.cols)?;
        out.degree_cap = self.degree_cap;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.entries[idx] = out.entries[idx].add(&a.mul(b, f), f);
                    }
                }
            }
        }
        out.check_cap()?;
        Ok(out)
    }

    pub fn pow(&self, t: u32) -> Result<PolyMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::zeros(self.field.clone(), self.nvars, self.rows, self.cols)?;
        acc.degree_cap = self.degree_cap;
        for i in 0..self.rows {
            acc.entries[i * self.cols + i] = Poly::constant(1);
        }
        for _ in 0..t {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Specializes every variable; `point[i]` is the value of `t_i` in `ext`.
    pub fn evaluate(&self, point: &[Elem], ext: &Arc<FieldContext>) -> Result<DenseMatrix> {
        if ext.characteristic() != self.field.characteristic() {
            return Err(Error::invalid("evaluation field has the wrong characteristic"));
        }
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, matrix has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let data = self.entries.iter().map(|e| e.evaluate(point, ext)).collect();
        DenseMatrix::from_vec(ext.clone(), self.rows, self.cols, data)
    }

    pub fn generic_rank(&self) -> Result<usize> {
        Ok(self.generic_rank_profile(DEFAULT_WORK_BUDGET)?.rank)
    }

    /// Bareiss elimination with full pivoting on the entry of least
    /// `(degree, term count)`, first in row-major order on ties.
    pub fn generic_rank_profile(&self, work_budget: u64) -> Result<GenericRank> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut row_idx: Vec<usize> = (0..rows).collect();
        let mut col_idx: Vec<usize> = (0..cols).collect();
        let mut prev = Poly::constant(1);
        let mut work = 0u64;
        let mut rank = 0;
        let charge = |work: &mut u64, units: u64| -> Result<()> {
            *work += units;
            if *work > work_budget {
                Err(Error::WorkBudgetExceeded(work_budget))
            } else {
                Ok(())
            }
        };
        for k in 0..rows.min(cols) {
            let mut best: Option<(u32, usize, usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    let e = &a[i * cols + j];
                    if e.is_zero() {
                        continue;
                    }
                    let key = (e.degree(), e.len(), i, j);
                    if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                        best = Some(key);
                    }
                }
            }
            let Some((_, _, pi, pj)) = best else { break };
            if pi != k {
                for j in 0..cols {
                    a.swap(pi * cols + j, k * cols + j);
                }
                row_idx.swap(pi, k);
            }
            if pj != k {
                for i in 0..rows {
                    a.swap(i * cols + pj, i * cols + k);
                }
                col_idx.swap(pj, k);
            }
            let pivot = a[k * cols + k].clone();
            for i in k + 1..rows {
                let lead = std::mem::take(&mut a[i * cols + k]);
                for j in k + 1..cols {
                    let idx = i * cols + j;
                    let x = &a[idx];
                    let top = &a[k * cols + j];
                    if x.is_zero() && (lead.is_zero() || top.is_zero()) {
                        continue;
                    }
                    charge(&mut work, (pivot.len() * x.len() + lead.len() * top.len()) as u64)?;
                    let mut num = pivot.mul(x, &f);
                    if !lead.is_zero() && !top.is_zero() {
                        num = num.sub(&lead.mul(top, &f), &f);
                    }
                    charge(&mut work, (num.len() * prev.len()) as u64)?;
                    let q = num
                        .div_exact(&prev, &f)
                        .ok_or_else(|| Error::internal("Bareiss step produced an inexact division"))?;
                    if q.degree() > self.degree_cap {
                        return Err(Error::DegreeCapExceeded {
                            degree: q.degree(),
                            cap: self.degree_cap,
                        });
                    }
                    a[idx] = q;
                }
            }
            prev = pivot;
            rank += 1;
        }
        let mut rows_sel = row_idx[..rank].to_vec();
        let mut cols_sel = col_idx[..rank].to_vec();
        rows_sel.sort_unstable();
        cols_sel.sort_unstable();
        Ok(GenericRank {
            rank,
            rows: rows_sel,
            cols: cols_sel,
            work,
        })
    }
}
