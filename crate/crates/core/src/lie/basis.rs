use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};

/// The basis `{σ ω_n : σ ∈ S_{n,1}}` of `Lie(n)`, ordered lexicographically
/// on `(σ(2), ..., σ(n))`.
///
/// Permutations fixing 1 are exactly the first `(n-1)!` permutations in the
/// lexicographic order of `S_n`, so the index of `σ` is its `lex_rank`.
#[derive(Clone, Debug)]
pub struct LieBasis {
    n: usize,
    elements: Vec<Permutation>,
}

impl LieBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Lie(n) needs n >= 1"));
        }
        let dim = factorial(n - 1)
            .filter(|&d| d <= 1 << 22)
            .ok_or_else(|| Error::Resource(format!("basis of Lie({n}) is too large to list")))?;
        let elements = (0..dim)
            .map(|r| Permutation::from_lex_rank(r, n))
            .collect::<Result<_>>()?;
        Ok(LieBasis { n, elements })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn unrank(&self, i: usize) -> Option<&Permutation> {
        self.elements.get(i)
    }

    /// Position of `σ`, or `None` when `σ` does not fix 1.
    pub fn rank(&self, sigma: &Permutation) -> Option<usize> {
        if sigma.degree() != self.n || sigma.image(1) != 1 {
            return None;
        }
        Some(sigma.lex_rank())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_fixes_one_and_is_sorted() {
        let b = LieBasis::new(5).unwrap();
        assert_eq!(b.len(), 24);
        for (i, s) in b.elements().iter().enumerate() {
            assert_eq!(s.image(1), 1);
            assert_eq!(b.rank(s), Some(i));
        }
        assert!(b.elements().windows(2).all(|w| w[0].images() < w[1].images()));
        assert_eq!(b.rank(&Permutation::parse_cycles("(1,2)", 5).unwrap()), None);
        assert_eq!(LieBasis::new(1).unwrap().len(), 1);
    }
}
