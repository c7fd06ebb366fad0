//! Sparse elements of `GF(p) S_n`, the Dynkin-Specht-Wever element
//! `ω_n = (1 - d_2)(1 - d_3)...(1 - d_n)` and straightening of `ρ ω_n` onto
//! the point stabilizer `S_{n,1}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linalg::Elem;
use crate::perm::{descending_cycle, factorial, is_prime, Permutation};

type Registry<K, V> = RwLock<HashMap<K, Arc<V>>>;

/// Largest degree for which `dsw_element` expands `ω_n` (support up to `2^11`).
pub const DSW_MAX_DEGREE: usize = 12;

#[derive(Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    degree: usize,
    p: u32,
    terms: BTreeMap<Permutation, Elem>,
}

impl GroupAlgebraElement {
    pub fn zero(n: usize, p: u32) -> Result<Self> {
        if !is_prime(p) || p > crate::linalg::MAX_PRIME {
            return Err(Error::invalid(format!("{p} is not a supported prime")));
        }
        Ok(GroupAlgebraElement {
            degree: n,
            p,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(n: usize, p: u32) -> Result<Self> {
        Self::from_perm(&Permutation::identity(n), p)
    }

    pub fn from_perm(g: &Permutation, p: u32) -> Result<Self> {
        Self::from_terms(g.degree(), p, [(g.clone(), 1)])
    }

    /// Sums `c * g` over the given pairs; integer coefficients are reduced mod `p`.
    pub fn from_terms(n: usize, p: u32, terms: impl IntoIterator<Item = (Permutation, i64)>) -> Result<Self> {
        let mut out = Self::zero(n, p)?;
        for (g, c) in terms {
            if g.degree() != n {
                return Err(Error::DegreeMismatch {
                    left: n,
                    right: g.degree(),
                });
            }
            out.add_term(g, c.rem_euclid(p as i64) as Elem);
        }
        Ok(out)
    }

    fn add_term(&mut self, g: Permutation, c: Elem) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = ((*o.get() as u32 + c as u32) % self.p) as Elem;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Number of permutations with nonzero coefficient.
    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, Elem)> {
        self.terms.iter().map(|(g, &c)| (g, c))
    }

    pub fn coefficient(&self, g: &Permutation) -> Elem {
        self.terms.get(g).copied().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        if self.p != other.p {
            return Err(Error::invalid(format!(
                "characteristics differ: {} vs {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(self.p as Elem - 1))
    }

    pub fn scale(&self, c: Elem) -> Self {
        let c = (c as u32 % self.p) as Elem;
        let terms = if c == 0 {
            BTreeMap::new()
        } else {
            self.terms
                .iter()
                .map(|(g, &x)| (g.clone(), ((x as u32 * c as u32) % self.p) as Elem))
                .collect()
        };
        GroupAlgebraElement { terms, ..self.clone() }
    }

    /// Convolution product; permutations compose right to left.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.p;
        let mut acc: HashMap<Permutation, u32> = HashMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let slot = acc.entry(a.compose_unchecked(b)).or_insert(0);
                *slot = (*slot + ca as u32 * cb as u32) % p;
            }
        }
        Ok(GroupAlgebraElement {
            degree: self.degree,
            p,
            terms: acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|(g, c)| (g, c as Elem))
                .collect(),
        })
    }

    /// `g * self`.
    pub fn left_mul_perm(&self, g: &Permutation) -> Result<Self> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: g.degree(),
                right: self.degree,
            });
        }
        Ok(GroupAlgebraElement {
            terms: self.terms.iter().map(|(h, &c)| (g.compose_unchecked(h), c)).collect(),
            ..self.clone()
        })
    }

    /// Whether every permutation in the support fixes the point 1.
    pub fn supported_on_point_stabilizer(&self) -> bool {
        self.terms.keys().all(|g| g.degree() == 0 || g.image(1) == 1)
    }

    /// Coordinates in the regular module, indexed by [`Permutation::lex_rank`].
    pub fn to_regular_vector(&self) -> Result<Vec<Elem>> {
        let len = factorial(self.degree)
            .filter(|&l| l <= 1 << 24)
            .ok_or_else(|| Error::Resource(format!("regular module of S_{} is too large", self.degree)))?;
        let mut v = vec![0; len];
        for (g, &c) in &self.terms {
            v[g.lex_rank()] = c;
        }
        Ok(v)
    }
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [GF({}) S_{}]", self.p, self.degree)
    }
}

pub fn ga_multiply(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    a.mul(b)
}

/// `ω_s` for `s <= n`, as an element of `GF(p) S_n`.
fn partial_omegas(n: usize, p: u32) -> Result<Vec<GroupAlgebraElement>> {
    let mut out = vec![GroupAlgebraElement::identity(n, p)?];
    for r in 2..=n {
        let d = descending_cycle(r, n)?;
        let prev = out.last().expect("nonempty");
        let mut next = prev.clone();
        for (g, c) in prev.terms() {
            next.add_term(g.compose_unchecked(&d), (p - c as u32) as Elem);
        }
        out.push(next);
    }
    Ok(out)
}

/// The Dynkin-Specht-Wever element `ω_n`; `ω_1` (and `ω_0`) is the identity.
pub fn dsw_element(n: usize, p: u32) -> Result<GroupAlgebraElement> {
    if n > DSW_MAX_DEGREE {
        return Err(Error::Resource(format!(
            "expanding ω_{n} exceeds the configured degree bound {DSW_MAX_DEGREE}"
        )));
    }
    Ok(partial_omegas(n, p)?.pop().expect("nonempty"))
}

/// Checks `ω_n^2 = (n mod p) ω_n` exactly.
pub fn omega_square_check(n: usize, p: u32) -> Result<bool> {
    let w = dsw_element(n, p)?;
    Ok(w.mul(&w)? == w.scale((n as u32 % p) as Elem))
}

/// Precomputed straightening data for one `(n, p)`.
///
/// For `r = ρ^{-1}(1) >= 2` the rewrite is `ρ ω_n = ρ x_r ω_n` with
/// `x_r = -ω_{r-1} d_r`; every permutation in `x_r` maps 1 to `r`, so every
/// term of `ρ x_r` fixes 1.
#[derive(Debug)]
pub struct Straightener {
    n: usize,
    p: u32,
    rewrites: Vec<Vec<(Permutation, Elem)>>,
}

impl Straightener {
    pub fn new(n: usize, p: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("degree must be positive"));
        }
        if n > DSW_MAX_DEGREE {
            return Err(Error::Resource(format!(
                "straightening in S_{n} exceeds the degree bound {DSW_MAX_DEGREE}"
            )));
        }
        let omegas = partial_omegas(n - 1, p)?;
        let mut rewrites = vec![Vec::new(), Vec::new()];
        for r in 2..=n {
            let d = descending_cycle(r, n)?;
            let w = omegas[r - 2].terms().map(|(g, c)| {
                let g = g.extend(n).expect("degree grows");
                (g.compose_unchecked(&d), (p - c as u32) as Elem % p as Elem)
            });
            rewrites.push(w.collect());
        }
        Ok(Straightener { n, p, rewrites })
    }

    /// Shared instance; concurrent callers only contend on the table lookup.
    pub fn get(n: usize, p: u32) -> Result<Arc<Straightener>> {
        static CACHE: OnceLock<Registry<(usize, u32), Straightener>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.read().expect("straightener cache poisoned").get(&(n, p)) {
            return Ok(s.clone());
        }
        let built = Arc::new(Straightener::new(n, p)?);
        let mut w = cache.write().expect("straightener cache poisoned");
        Ok(w.entry((n, p)).or_insert(built).clone())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Calls `emit(σ, c)` for each term of the straightened form of `ρ`.
    /// Emitted permutations are distinct and all fix 1.
    pub fn for_each_term(&self, rho: &Permutation, mut emit: impl FnMut(Permutation, Elem)) {
        debug_assert_eq!(rho.degree(), self.n);
        let r = rho.inverse().image(1);
        if r == 1 {
            emit(rho.clone(), 1);
            return;
        }
        for (x, c) in &self.rewrites[r] {
            emit(rho.compose_unchecked(x), *c);
        }
    }

    pub fn straighten(&self, rho: &Permutation) -> Result<GroupAlgebraElement> {
        if rho.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: rho.degree(),
                right: self.n,
            });
        }
        let mut out = GroupAlgebraElement::zero(self.n, self.p)?;
        self.for_each_term(rho, |g, c| {
            out.terms.insert(g, c);
        });
        Ok(out)
    }
}

/// An element `x` supported on `S_{n,1}` with `x ω_n = ρ ω_n`.
pub fn straighten(rho: &Permutation, p: u32) -> Result<GroupAlgebraElement> {
    Straightener::get(rho.degree(), p)?.straighten(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn small_omegas() {
        assert_eq!(dsw_element(1, 3).unwrap().to_string(), "1*()");
        assert_eq!(dsw_element(2, 3).unwrap().to_string(), "1*() + 2*(1,2)");
        let w3 = dsw_element(3, 5).unwrap();
        let expected = GroupAlgebraElement::from_terms(
            3,
            5,
            [
                (Permutation::identity(3), 1),
                (perm(3, "(1,2)"), -1),
                (descending_cycle(3, 3).unwrap(), -1),
                (perm(3, "(1,3)"), 1),
            ],
        )
        .unwrap();
        assert_eq!(w3, expected);
    }

    #[test]
    fn product_examples() {
        let d2 = perm(2, "(1,2)");
        let one = GroupAlgebraElement::identity(2, 3).unwrap();
        let d = GroupAlgebraElement::from_perm(&d2, 3).unwrap();
        assert!(one.sub(&d).unwrap().mul(&one.add(&d).unwrap()).unwrap().is_zero());
        let w = dsw_element(2, 2).unwrap();
        assert!(w.mul(&w).unwrap().is_zero());
        assert_eq!(w.mul(&GroupAlgebraElement::identity(2, 2).unwrap()).unwrap(), w);
    }

    #[test]
    fn omega_squares() {
        assert!(omega_square_check(3, 3).unwrap());
        assert!(omega_square_check(4, 2).unwrap());
        assert!(omega_square_check(5, 2).unwrap());
    }

    #[test]
    fn straighten_transposition() {
        let s = straighten(&perm(2, "(1,2)"), 3).unwrap();
        assert_eq!(s.to_string(), "2*()");
        let s = straighten(&perm(2, "(1,2)"), 2).unwrap();
        assert_eq!(s.to_string(), "1*()");
    }

    #[test]
    fn straighten_preserves_product_with_omega() {
        for n in 1..=5 {
            for p in [2, 3, 5] {
                let w = dsw_element(n, p).unwrap();
                for rank in 0..factorial(n).unwrap() {
                    let rho = Permutation::from_lex_rank(rank, n).unwrap();
                    let x = straighten(&rho, p).unwrap();
                    assert!(x.supported_on_point_stabilizer());
                    let lhs = x.mul(&w).unwrap();
                    let rhs = GroupAlgebraElement::from_perm(&rho, p).unwrap().mul(&w).unwrap();
                    assert_eq!(lhs, rhs, "n={n} p={p} rho={rho}");
                }
            }
        }
    }
}
