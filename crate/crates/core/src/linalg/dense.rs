use std::fmt;
use std::sync::Arc;

use super::gf::{Elem, FieldContext};
use super::packed::{BitMatrix, SlicedMatrix, MAX_PLANES};
use crate::error::{Error, Result};

/// Dense row-major matrix over a finite field.
#[derive(Clone)]
pub struct DenseMatrix {
    field: Arc<FieldContext>,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl DenseMatrix {
    pub fn zeros(field: Arc<FieldContext>, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Arc<FieldContext>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(field: Arc<FieldContext>, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.order();
        if let Some(bad) = data.iter().find(|&&x| x as u32 >= q) {
            return Err(Error::invalid(format!("entry {bad} is not an element of GF({q})")));
        }
        Ok(DenseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: Arc<FieldContext>, rows: &[Vec<Elem>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(field, r, c, rows.concat())
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reinterprets a matrix over `GF(p)` as one over the extension `field`
    /// (same characteristic). Entries keep their encoding.
    pub fn over_field(&self, field: Arc<FieldContext>) -> Result<Self> {
        if field.characteristic() != self.field.characteristic() {
            return Err(Error::invalid("cannot change characteristic"));
        }
        if self.field.degree() != 1 && field.degree() != self.field.degree() {
            return Err(Error::invalid("only prime-field matrices can be lifted"));
        }
        Ok(DenseMatrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(DenseMatrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(DenseMatrix { data, ..self.clone() })
    }

    pub fn scale(&self, c: Elem) -> Self {
        let mut out = self.clone();
        out.field.clone().scale(&mut out.data, c);
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Elem, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.field.clone().axpy(&mut self.data, c, &other.data);
        Ok(())
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("minus_identity needs a square matrix".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i);
            out.set(i, i, self.field.sub(v, 1));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field.characteristic() == 2 && self.field.degree() == 1 && self.rows * other.cols >= 64 * 64 {
            let a = BitMatrix::from_dense(self)?;
            let b = BitMatrix::from_dense(other)?;
            return Ok(a.mul(&b)?.to_dense(self.field.clone()));
        }
        Ok(self.mul_generic(other))
    }

    pub(crate) fn mul_generic(&self, other: &Self) -> Self {
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    f.axpy(dst, a, other.row(k));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn pow(&self, t: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.field.clone(), self.rows);
        for _ in 0..t {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Rank over the matrix's field. Characteristic 2 takes the bit-packed path.
    pub fn rank(&self) -> usize {
        if self.field.characteristic() == 2 {
            if self.field.degree() == 1 {
                return BitMatrix::from_dense(self).expect("GF(2) entries").rank();
            }
            if self.field.degree() <= MAX_PLANES {
                return SlicedMatrix::from_dense(self).expect("GF(2^e) entries").rank();
            }
        }
        self.rank_generic()
    }

    /// Rank by plain row reduction on the element-per-entry representation.
    pub fn rank_generic(&self) -> usize {
        let mut work = self.data.clone();
        row_reduce(&self.field, &mut work, self.rows, self.cols, false).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        if self.field.order() == 2 && self.rows * self.cols >= 64 * 64 {
            let mut b = BitMatrix::from_dense(self).expect("GF(2) entries");
            let pivots = b.rref();
            return (b.to_dense(self.field.clone()), pivots);
        }
        let mut work = self.data.clone();
        let pivots = row_reduce(&self.field, &mut work, self.rows, self.cols, true);
        (
            DenseMatrix {
                data: work,
                ..self.clone()
            },
            pivots,
        )
    }

    /// Row and column indices of a maximal nonsingular square submatrix.
    pub fn rank_profile(&self) -> (Vec<usize>, Vec<usize>) {
        // Column pivots of the transpose give independent rows; on those rows,
        // column pivots give the columns.
        let (_, row_idx) = self.transpose().rref();
        let sub = self.select_rows(&row_idx);
        let (_, col_idx) = sub.rref();
        (row_idx, col_idx)
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hconcat of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(DenseMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, idx)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        DenseMatrix {
            field: self.field.clone(),
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        DenseMatrix {
            field: self.field.clone(),
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Rank of `self^t`, computed by repeated multiplication.
    pub fn nilpotent_power_rank(&self, t: u32) -> Result<usize> {
        Ok(self.pow(t)?.rank())
    }

    /// Entries as `u8`; fails unless every entry fits in a byte.
    pub fn to_bytes(&self) -> Option<Vec<u8>> {
        self.data.iter().map(|&x| u8::try_from(x).ok()).collect()
    }
}

/// Forward elimination (full reduction when `reduce_up`), pivot = first
/// nonzero entry in the column. Returns pivot columns.
fn row_reduce(f: &FieldContext, a: &mut [Elem], rows: usize, cols: usize, reduce_up: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv_nonzero(a[r * cols + c]);
        f.scale(&mut a[r * cols + c..(r + 1) * cols], inv);
        let (head, tail) = a.split_at_mut(r * cols);
        let (pivot_row, below) = tail.split_at_mut(cols);
        let pivot_slice = &pivot_row[c..];
        for i in 0..rows - r - 1 {
            let row = &mut below[i * cols..(i + 1) * cols];
            let x = row[c];
            if x != 0 {
                f.axpy(&mut row[c..], f.neg(x), pivot_slice);
            }
        }
        if reduce_up {
            for i in 0..r {
                let row = &mut head[i * cols..(i + 1) * cols];
                let x = row[c];
                if x != 0 {
                    f.axpy(&mut row[c..], f.neg(x), pivot_slice);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl PartialEq for DenseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field.characteristic() == other.field.characteristic()
            && self.field.degree() == other.field.degree()
            && self.data == other.data
    }
}

impl Eq for DenseMatrix {}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field.label())?;
        for i in 0..self.rows.min(16) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(16)])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, e: u32) -> Arc<FieldContext> {
        FieldContext::get(p, e).unwrap()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(DenseMatrix::identity(gf(2, 1), 3).rank(), 3);
        let m = DenseMatrix::from_rows(gf(2, 1), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(DenseMatrix::zeros(gf(5, 1), 4, 7).rank(), 0);
        assert_eq!(DenseMatrix::zeros(gf(5, 1), 0, 0).rank(), 0);
    }

    #[test]
    fn nilpotent_power_ranks() {
        let f = gf(3, 1);
        let n = DenseMatrix::from_rows(f.clone(), &[vec![0, 1, 2], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(n.nilpotent_power_rank(0).unwrap(), 3);
        assert_eq!(n.nilpotent_power_rank(1).unwrap(), 2);
        // N^2 has the single corner entry 1*1 = 1.
        assert_eq!(n.pow(2).unwrap().get(0, 2), 1);
        assert_eq!(n.nilpotent_power_rank(2).unwrap(), 1);
        assert_eq!(n.nilpotent_power_rank(3).unwrap(), 0);
    }

    #[test]
    fn rref_and_profile() {
        let f = gf(5, 1);
        let m = DenseMatrix::from_rows(f, &[vec![0, 2, 4], vec![0, 1, 2], vec![1, 0, 3]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.row(0), &[1, 0, 3]);
        assert_eq!(r.row(1), &[0, 1, 2]);
        let (rows, cols) = m.rank_profile();
        assert_eq!(rows.len(), 2);
        assert_eq!(m.submatrix(&rows, &cols).rank(), 2);
    }

    #[test]
    fn dimension_errors() {
        let f = gf(3, 1);
        let a = DenseMatrix::zeros(f.clone(), 2, 3);
        assert!(a.mul(&a).is_err());
        assert!(a.add(&DenseMatrix::zeros(f.clone(), 3, 2)).is_err());
        assert!(DenseMatrix::from_vec(f.clone(), 2, 2, vec![0; 3]).is_err());
        assert!(DenseMatrix::from_vec(f, 1, 1, vec![3]).is_err());
    }
}
