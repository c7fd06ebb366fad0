use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{1, ..., n}`.
///
/// Stored 0-based as an image table; every public interface speaks 1-based
/// points. Products compose right to left: `a.compose(&b)` applies `b` first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from 1-based images: `images[j - 1]` is the image of `j`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::invalid(format!(
                    "image table {images:?} is not a bijection of 1..={n}"
                )));
            }
            seen[x - 1] = true;
            out.push((x - 1) as u32);
        }
        Ok(Permutation { images: out })
    }

    /// Builds a permutation of degree `n` from disjoint cycles of 1-based points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let owned: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
        Self::from_cycle_vecs(n, &owned)
    }

    fn from_cycle_vecs(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n {
                    return Err(Error::invalid(format!("point {x} outside 1..={n}")));
                }
                if used[x - 1] {
                    return Err(Error::invalid(format!("point {x} repeated in cycles")));
                }
                used[x - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                images[x - 1] = (next - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `"(1,2)(3,4)"`; `"()"` is the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "()" {
            return Ok(Self::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::invalid(format!("malformed cycle notation {text:?}")))?;
            let (inner, tail) = body;
            if !inner.is_empty() {
                let cycle = inner
                    .split(',')
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::invalid(format!("bad point {t:?} in {text:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                cycles.push(cycle);
            }
            rest = tail;
        }
        Self::from_cycle_vecs(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `x`.
    pub fn image(&self, x: usize) -> usize {
        self.images[x - 1] as usize + 1
    }

    /// 1-based image table.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Self::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&base);
            }
            base = base.compose_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Order as a group element (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .map(|c| c.len() as u64)
            .fold(1, |acc, l| acc / gcd(acc, l) * l)
    }

    /// Same permutation viewed in `S_n` for `n >= degree`, fixing the new points.
    pub fn extend(&self, n: usize) -> Result<Permutation> {
        if n < self.degree() {
            return Err(Error::invalid(format!(
                "cannot restrict a degree-{} permutation to degree {n}",
                self.degree()
            )));
        }
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..n as u32);
        Ok(Permutation { images })
    }

    /// Non-trivial cycles with 1-based points, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn support(&self) -> Vec<usize> {
        (1..=self.degree()).filter(|&x| self.image(x) != x).collect()
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree() && self.compose_unchecked(other) == other.compose_unchecked(self)
    }

    /// 0-based position of the image tuple in lexicographic order over `S_n`.
    pub fn lex_rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.images[i + 1..].iter().filter(|&&x| x < self.images[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(mut rank: usize, n: usize) -> Result<Self> {
        let total = factorial(n).ok_or_else(|| Error::invalid(format!("{n}! overflows the index type")))?;
        if rank >= total {
            return Err(Error::invalid(format!("rank {rank} outside 0..{n}!")));
        }
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut free: Vec<u32> = (0..n as u32).collect();
        let images = digits.into_iter().map(|d| free.remove(d)).collect();
        Ok(Permutation { images })
    }
}

pub fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        write!(f, "[S_{}]", self.degree())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses cycle notation, taking the degree to be the largest point mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Self::parse_cycles(s, n)
    }
}

/// `a ∘ b` with a degree check.
pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    a.compose(b)
}

/// The descending cycle `d_i = (i, i-1, ..., 1)` in `S_n`.
pub fn descending_cycle(i: usize, n: usize) -> Result<Permutation> {
    if i < 2 || i > n {
        return Err(Error::invalid(format!(
            "descending cycle d_{i} needs 2 <= i <= n = {n}"
        )));
    }
    let mut images: Vec<u32> = (0..n as u32).collect();
    images[0] = (i - 1) as u32;
    for (j, slot) in images.iter_mut().enumerate().take(i).skip(1) {
        *slot = (j - 1) as u32;
    }
    Ok(Permutation { images })
}

/// The long cycle `a_p = (1, 2, ..., p)` in `S_p`.
pub fn long_cycle(p: usize) -> Permutation {
    let images = (0..p as u32).map(|i| (i + 1) % p as u32).collect();
    Permutation { images }
}

/// `σ[i]`: `σ ∈ S_r` acting on the `i`-th block `{(i-1)r+1, ..., ir}` of `{1..n}`.
pub fn embed_block(sigma: &Permutation, i: usize, n: usize) -> Result<Permutation> {
    let r = sigma.degree();
    if i == 0 || i * r > n {
        return Err(Error::invalid(format!("block {i} of size {r} does not fit in 1..={n}")));
    }
    let offset = ((i - 1) * r) as u32;
    let mut images: Vec<u32> = (0..n as u32).collect();
    for (j, &x) in sigma.raw().iter().enumerate() {
        images[offset as usize + j] = offset + x;
    }
    Ok(Permutation { images })
}

/// `Δ_s σ = σ[1] σ[2] ... σ[s]`, a permutation of degree `r s`.
pub fn delta(s: usize, sigma: &Permutation) -> Result<Permutation> {
    if s == 0 {
        return Err(Error::invalid("Δ_s needs s >= 1"));
    }
    let r = sigma.degree();
    let images = (0..s)
        .flat_map(|b| sigma.raw().iter().map(move |&x| (b * r) as u32 + x))
        .collect();
    Ok(Permutation { images })
}

/// `τ^{[r]}`: moves the blocks of size `r` rigidly, block `i` to block `τ(i)`.
pub fn outer_perm(tau: &Permutation, r: usize) -> Result<Permutation> {
    if r == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    let images = tau
        .raw()
        .iter()
        .flat_map(|&ti| (0..r as u32).map(move |j| ti * r as u32 + j))
        .collect();
    Ok(Permutation { images })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn lex_rank_round_trip() {
        for r in 0..24 {
            let g = Permutation::from_lex_rank(r, 4).unwrap();
            assert_eq!(g.lex_rank(), r);
        }
        assert!(Permutation::identity(5).lex_rank() == 0);
        assert_eq!(
            Permutation::from_lex_rank(119, 5).unwrap().images(),
            vec![5, 4, 3, 2, 1]
        );
        assert!(Permutation::from_lex_rank(6, 3).is_err());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let c = compose(&perm(3, "(1,2)"), &perm(3, "(2,3)")).unwrap();
        assert_eq!(c.images(), vec![2, 3, 1]);
        assert_eq!(c.to_string(), "(1,2,3)");
    }

    #[test]
    fn compose_identity_and_involution() {
        let g = perm(5, "(1,4,2)(3,5)");
        assert_eq!(compose(&Permutation::identity(5), &g).unwrap(), g);
        let d2 = descending_cycle(2, 2).unwrap();
        assert!(compose(&d2, &d2).unwrap().is_identity());
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = compose(&Permutation::identity(3), &Permutation::identity(4)).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn descending_cycles() {
        assert_eq!(descending_cycle(2, 4).unwrap(), perm(4, "(1,2)"));
        assert_eq!(descending_cycle(3, 3).unwrap().images(), vec![3, 1, 2]);
        assert!(descending_cycle(1, 4).is_err());
        assert!(descending_cycle(5, 4).is_err());
    }

    #[test]
    fn block_constructions() {
        let a2 = long_cycle(2);
        assert_eq!(embed_block(&a2, 2, 4).unwrap(), perm(4, "(3,4)"));
        assert_eq!(embed_block(&a2, 1, 4).unwrap(), perm(4, "(1,2)"));
        assert!(embed_block(&Permutation::identity(3), 2, 7).unwrap().is_identity());
        assert!(embed_block(&a2, 3, 5).is_err());

        assert_eq!(delta(2, &a2).unwrap(), perm(4, "(1,2)(3,4)"));
        assert_eq!(delta(3, &a2).unwrap(), perm(6, "(1,2)(3,4)(5,6)"));
        let s = perm(4, "(1,3,2)");
        assert_eq!(delta(1, &s).unwrap(), s);

        assert_eq!(outer_perm(&a2, 2).unwrap(), perm(4, "(1,3)(2,4)"));
        assert!(outer_perm(&Permutation::identity(3), 4).unwrap().is_identity());
        assert_eq!(outer_perm(&long_cycle(3), 1).unwrap(), long_cycle(3));
    }

    #[test]
    fn cycle_notation_round_trip() {
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert!(perm(4, "()").is_identity());
        let g = perm(7, "(1,5,2)(3,7)");
        assert_eq!(perm(7, &g.to_string()), g);
        assert!(Permutation::parse_cycles("(1,2", 3).is_err());
        assert!(Permutation::parse_cycles("(1,4)", 3).is_err());
        assert!(Permutation::parse_cycles("(1,2)(2,3)", 3).is_err());
        assert_eq!("(2,3)".parse::<Permutation>().unwrap().degree(), 3);
    }

    #[test]
    fn order_and_inverse() {
        let g = perm(6, "(1,2,3)(4,5)");
        assert_eq!(g.order(), 6);
        assert!(g.compose(&g.inverse()).unwrap().is_identity());
        assert!(g.pow(6).is_identity());
        assert_eq!(g.pow(2), perm(6, "(1,3,2)"));
    }

    #[test]
    fn from_images_validates() {
        assert!(Permutation::from_images(&[2, 1, 3]).is_ok());
        assert!(Permutation::from_images(&[2, 2, 3]).is_err());
        assert!(Permutation::from_images(&[0, 1]).is_err());
    }
}
