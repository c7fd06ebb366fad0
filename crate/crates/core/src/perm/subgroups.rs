//! The distinguished maximal elementary abelian `p`-subgroups of `S_n`.
//!
//! `E_r ⊆ S_{p^r}` is generated by `Δ_{p^{r-1}} a_p, Δ_{p^{r-2}} a_p^{[p]}, ...,
//! a_p^{[p^{r-1}]}`; every maximal elementary abelian subgroup of `S_n` is
//! conjugate to a product of block-shifted copies `E_{r_1} × ... × E_{r_t}` with
//! `p^{r_1} + ... + p^{r_t} = p⌊n/p⌋` and `r_1 >= ... >= r_t`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::permutation::{delta, embed_block, long_cycle, outer_perm, Permutation};
use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Weakly decreasing exponent sequence `(r_1, ..., r_t)` naming a subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupShape {
    parts: Vec<u32>,
    prime: u32,
}

impl SubgroupShape {
    pub fn new(parts: Vec<u32>, prime: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::invalid(format!("{prime} is not prime")));
        }
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid(format!(
                "shape parts must be positive integers, got {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("shape {parts:?} is not weakly decreasing")));
        }
        for &r in &parts {
            if (prime as u64).checked_pow(r).is_none_or(|v| v > u32::MAX as u64) {
                return Err(Error::invalid(format!("{prime}^{r} is too large")));
            }
        }
        Ok(SubgroupShape { parts, prime })
    }

    /// Parses the comma-separated form, e.g. `"2,1"`.
    pub fn parse(text: &str, prime: u32) -> Result<Self> {
        let parts = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad shape entry {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts, prime)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Elementary abelian rank `k = r_1 + ... + r_t`.
    pub fn rank(&self) -> usize {
        self.parts.iter().map(|&r| r as usize).sum()
    }

    /// Number of moved points, `p^{r_1} + ... + p^{r_t}`.
    pub fn support_size(&self) -> usize {
        self.parts.iter().map(|&r| (self.prime as usize).pow(r)).sum()
    }

    /// Checks `Σ p^{r_i} = p⌊n/p⌋`.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        let p = self.prime as usize;
        let target = p * (n / p);
        if self.support_size() != target {
            return Err(Error::invalid(format!(
                "shape {self} moves {} points but p*floor(n/p) = {target} for n = {n}, p = {p}",
                self.support_size()
            )));
        }
        Ok(())
    }

    /// All shapes for `(n, p)`, coarsest first.
    pub fn enumerate(n: usize, p: u32) -> Result<Vec<SubgroupShape>> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let pu = p as usize;
        let target = pu * (n / pu);
        if target == 0 {
            return Ok(Vec::new());
        }
        let mut max_r = 1u32;
        while pu.pow(max_r + 1) <= target {
            max_r += 1;
        }
        let mut out = Vec::new();
        partitions_into_powers(target, max_r, pu, &mut Vec::new(), &mut out);
        out.into_iter().map(|parts| Self::new(parts, p)).collect()
    }
}

fn partitions_into_powers(remaining: usize, max_r: u32, p: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for r in (1..=max_r).rev() {
        let size = p.pow(r);
        if size <= remaining {
            current.push(r);
            partitions_into_powers(remaining - size, r, p, current, out);
            current.pop();
        }
    }
}

impl fmt::Display for SubgroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl Serialize for SubgroupShape {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Commuting order-`p` generators of an elementary abelian `p`-subgroup of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemAbelianSubgroup {
    degree: usize,
    generators: Vec<Permutation>,
    shape: SubgroupShape,
    /// Inclusive 1-based intervals, one per factor `E_{r_j}`.
    support_blocks: Vec<(usize, usize)>,
    /// Number of generators contributed by each factor.
    factor_ranks: Vec<usize>,
}

impl ElemAbelianSubgroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn shape(&self) -> &SubgroupShape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn prime(&self) -> u32 {
        self.shape.prime
    }

    pub fn support_blocks(&self) -> &[(usize, usize)] {
        &self.support_blocks
    }

    pub fn order(&self) -> u128 {
        (self.prime() as u128).pow(self.rank() as u32)
    }

    /// Same subgroup viewed inside `S_n`, `n >= degree`.
    pub fn embed(&self, n: usize) -> Result<Self> {
        Ok(ElemAbelianSubgroup {
            degree: n,
            generators: self.generators.iter().map(|g| g.extend(n)).collect::<Result<_>>()?,
            ..self.clone()
        })
    }

    /// Splits off the last factor: returns generators of `E' = E_{r_1} × ... × E_{r_{t-1}}`
    /// and the rank `r_t` of the last factor.
    pub fn split_last_factor(&self) -> (Vec<Permutation>, usize) {
        let last = *self.factor_ranks.last().unwrap_or(&0);
        let head = self.generators[..self.generators.len() - last].to_vec();
        (head, last)
    }

    /// Largest moved point, or 0 for the trivial group.
    pub fn max_moved_point(&self) -> usize {
        self.generators.iter().flat_map(|g| g.support()).max().unwrap_or(0)
    }

    /// Every element of the group, as exponent vectors over the generators.
    /// The returned order is lexicographic in the exponent vector.
    pub fn elements(&self) -> Vec<(Vec<u32>, Permutation)> {
        let p = self.prime() as u64;
        let mut out = vec![(Vec::new(), Permutation::identity(self.degree))];
        for g in &self.generators {
            let powers: Vec<Permutation> = (0..p).map(|e| g.pow(e)).collect();
            out = out
                .into_iter()
                .flat_map(|(exps, h)| {
                    powers.iter().enumerate().map(move |(e, ge)| {
                        let mut ex = exps.clone();
                        ex.push(e as u32);
                        (ex, h.compose_unchecked(ge))
                    })
                })
                .collect();
        }
        out
    }

    /// Brute-force check of the structural invariants: generators commute, have
    /// order `p`, and generate a group of order exactly `p^rank`.
    pub fn verify_structure(&self, max_order: u128) -> Result<()> {
        let p = self.prime() as u64;
        for (i, g) in self.generators.iter().enumerate() {
            if g.order() != p {
                return Err(Error::internal(format!("generator {g} has order {} != {p}", g.order())));
            }
            for h in &self.generators[i + 1..] {
                if !g.commutes_with(h) {
                    return Err(Error::internal(format!("generators {g} and {h} do not commute")));
                }
            }
        }
        if self.order() <= max_order {
            let distinct: HashSet<Permutation> = self.elements().into_iter().map(|(_, g)| g).collect();
            if distinct.len() as u128 != self.order() {
                return Err(Error::internal(format!(
                    "group has {} elements, expected {}",
                    distinct.len(),
                    self.order()
                )));
            }
        }
        for (i, a) in self.support_blocks.iter().enumerate() {
            for b in &self.support_blocks[i + 1..] {
                if a.1 >= b.0 && b.1 >= a.0 {
                    return Err(Error::internal("support blocks overlap"));
                }
            }
        }
        Ok(())
    }
}

/// Generators of `E_r ⊆ S_{p^r}`, coarsest diagonal first.
fn regular_generators(r: u32, p: u32) -> Result<Vec<Permutation>> {
    let p = p as usize;
    let a_p = long_cycle(p);
    (1..=r)
        .map(|i| {
            let block = p.pow(i - 1);
            let lifted = outer_perm(&a_p, block)?;
            delta(p.pow(r - i), &lifted)
        })
        .collect()
}

/// The regular elementary abelian subgroup `E_r` of `S_{p^r}`.
pub fn regular_elem_abelian(r: u32, p: u32) -> Result<ElemAbelianSubgroup> {
    let shape = SubgroupShape::new(vec![r], p)?;
    let degree = (p as usize).pow(r);
    Ok(ElemAbelianSubgroup {
        degree,
        generators: regular_generators(r, p)?,
        shape,
        support_blocks: vec![(1, degree)],
        factor_ranks: vec![r as usize],
    })
}

/// The normal-form representative `∏_j E_{r_j}[s_j / p^{r_j}]` of `shape` inside `S_n`.
pub fn subgroup_for_shape(n: usize, shape: &SubgroupShape) -> Result<ElemAbelianSubgroup> {
    shape.validate_for(n)?;
    let p = shape.prime as usize;
    let mut generators = Vec::new();
    let mut support_blocks = Vec::new();
    let mut factor_ranks = Vec::new();
    let mut s_prev = 0usize;
    for &r in &shape.parts {
        let size = p.pow(r);
        let s_j = s_prev + size;
        debug_assert_eq!(s_j % size, 0);
        let block_index = s_j / size;
        for g in regular_generators(r, shape.prime)? {
            generators.push(embed_block(&g, block_index, n)?);
        }
        support_blocks.push((s_prev + 1, s_j));
        factor_ranks.push(r as usize);
        s_prev = s_j;
    }
    Ok(ElemAbelianSubgroup {
        degree: n,
        generators,
        shape: shape.clone(),
        support_blocks,
        factor_ranks,
    })
}

/// One representative per conjugacy class of maximal elementary abelian
/// `p`-subgroups of `S_n`, coarsest shape first. Empty when `n < p`.
pub fn maximal_elem_abelians(n: usize, p: u32) -> Result<Vec<ElemAbelianSubgroup>> {
    SubgroupShape::enumerate(n, p)?
        .iter()
        .map(|s| subgroup_for_shape(n, s))
        .collect()
}

impl FromStr for SubgroupShape {
    type Err = Error;

    /// Parses `"p:r1,r2,..."`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, parts) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("expected \"p:r1,r2,...\", got {s:?}")))?;
        let p = p
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad prime in {s:?}")))?;
        Self::parse(parts, p)
    }
}
