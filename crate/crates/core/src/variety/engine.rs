use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::points::{projective_points, ShiftedUnitPoint};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Elem, FieldContext, MAX_EXT_DEGREE};

/// Default cap on `|E| = p^k` for σ-element computations.
pub const DEFAULT_GROUP_ORDER_BUDGET: u128 = 512;
/// Default cap on the number of projective points per scan.
pub const DEFAULT_POINT_BUDGET: u128 = 100_000;

fn check_generators(gens: &[DenseMatrix]) -> Result<usize> {
    let first = gens
        .first()
        .ok_or_else(|| Error::invalid("at least one generator matrix is required"))?;
    let dim = first.rows();
    for m in gens {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "generator matrices must all be {dim}x{dim}, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(dim)
}

/// `N = Σ α_i (A_i - I)` over `field`, which must contain the entries of
/// both the matrices and `alpha`.
pub fn u_alpha_minus_one(gens: &[DenseMatrix], alpha: &[Elem], field: &Arc<FieldContext>) -> Result<DenseMatrix> {
    let dim = check_generators(gens)?;
    if alpha.len() != gens.len() {
        return Err(Error::DimensionMismatch(format!(
            "alpha has {} coordinates for {} generators",
            alpha.len(),
            gens.len()
        )));
    }
    for m in gens {
        let g = m.field();
        if g.characteristic() != field.characteristic() || !(g.degree() == 1 || g.degree() == field.degree()) {
            return Err(Error::invalid(format!(
                "matrix over {} cannot be read over {}",
                g.label(),
                field.label()
            )));
        }
    }
    if let Some(&x) = alpha.iter().find(|&&x| x as u32 >= field.order()) {
        return Err(Error::invalid(format!(
            "{x} is not an element of GF({})",
            field.order()
        )));
    }
    let mut data = vec![0; dim * dim];
    let mut trace_shift = 0;
    for (m, &a) in gens.iter().zip(alpha) {
        field.axpy(&mut data, a, m.data());
        trace_shift = field.add(trace_shift, a);
    }
    let shift = field.neg(trace_shift);
    for i in 0..dim {
        data[i * dim + i] = field.add(data[i * dim + i], shift);
    }
    DenseMatrix::from_vec(field.clone(), dim, dim, data)
}

/// Outcome of the freeness test at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub alpha: Vec<Elem>,
    pub e: u32,
    /// `rank(N^{p-1})`.
    pub rank: usize,
    #[serde(skip)]
    pub rank_n: usize,
    pub member: bool,
    #[serde(skip)]
    pub p: u32,
}

/// Tests freeness of `M` over `F⟨u_α⟩` by both `rank(N^{p-1}) = dim/p` and
/// `rank(N) = dim (p-1)/p`; disagreement is an internal error.
pub fn test_point(gens: &[DenseMatrix], alpha: &[Elem], field: &Arc<FieldContext>) -> Result<PointRecord> {
    if alpha.iter().all(|&x| x == 0) {
        return Err(Error::invalid("alpha = 0 is not a test point"));
    }
    let p = field.characteristic() as usize;
    let n = u_alpha_minus_one(gens, alpha, field)?;
    let dim = n.rows();
    let rank_n = n.rank();
    let rank = if p == 2 { rank_n } else { n.pow(p as u32 - 1)?.rank() };
    let divisible = dim % p == 0;
    let free_by_power = divisible && rank == dim / p;
    let free_by_rank = divisible && rank_n == dim * (p - 1) / p;
    if rank_n > dim * (p - 1) / p || rank > dim / p {
        return Err(Error::internal(format!(
            "u_alpha - 1 at {alpha:?} has rank {rank_n} and (p-1)-st power rank {rank} on a {dim}-dimensional module"
        )));
    }
    if free_by_power != free_by_rank {
        return Err(Error::internal(format!(
            "freeness criteria disagree at {alpha:?}: rank N = {rank_n}, rank N^(p-1) = {rank}, dim = {dim}"
        )));
    }
    Ok(PointRecord {
        alpha: alpha.to_vec(),
        e: field.degree(),
        rank,
        rank_n,
        member: !free_by_power,
        p: p as u32,
    })
}

/// Whether `α` lies in the rank variety, i.e. `M` is not free over `F⟨u_α⟩`.
pub fn is_member(gens: &[DenseMatrix], alpha: &[Elem], field: &Arc<FieldContext>) -> Result<bool> {
    Ok(test_point(gens, alpha, field)?.member)
}

fn scan_field(p: u32, e: u32) -> Result<Arc<FieldContext>> {
    if e == 0 || e > MAX_EXT_DEGREE {
        return Err(Error::invalid(format!(
            "extension degree {e} outside 1..={MAX_EXT_DEGREE}"
        )));
    }
    FieldContext::get(p, e)
}

/// One record per point of `P^{k-1}(GF(p^e))`, in enumeration order.
pub fn scan(gens: &[DenseMatrix], p: u32, e: u32, point_budget: u128) -> Result<Vec<PointRecord>> {
    check_generators(gens)?;
    let field = scan_field(p, e)?;
    let points = projective_points(gens.len(), &field, point_budget)?;
    points
        .par_iter()
        .map(|pt: &ShiftedUnitPoint| test_point(gens, &pt.alpha, &field))
        .collect()
}

/// Scan of `P^{k-1}(GF(p^e))` run on the projective-free part, with ranks
/// reported for the full module. A free `E`-module of rank `f` adds
/// `f p^{k-1}` to `rank(N^{p-1})` and `f (p-1) p^{k-1}` to `rank(N)` at every
/// point. The first point is recomputed on `full` as a check.
pub fn scan_reduced(
    full: &[DenseMatrix],
    reduced: &ProjectiveFreePart,
    e: u32,
    point_budget: u128,
) -> Result<Vec<PointRecord>> {
    check_generators(full)?;
    let k = full.len();
    let p = full[0].field().characteristic();
    let field = scan_field(p, e)?;
    let block = (p as usize).pow(k as u32 - 1) * reduced.sigma.free_count;
    let points = projective_points(k, &field, point_budget)?;
    let records = points
        .par_iter()
        .map(|pt: &ShiftedUnitPoint| {
            let mut r = test_point(&reduced.matrices, &pt.alpha, &field)?;
            r.rank += block;
            r.rank_n += block * (p as usize - 1);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = records.first() {
        let direct = test_point(full, &first.alpha, &field)?;
        if (direct.rank, direct.rank_n, direct.member) != (first.rank, first.rank_n, first.member) {
            return Err(Error::internal(format!(
                "projective-free reduction changed the ranks at {:?}: {} and {} on the module, {} and {} lifted",
                first.alpha, direct.rank_n, direct.rank, first.rank_n, first.rank
            )));
        }
    }
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaSummary {
    pub free_count: usize,
    pub pf_dim: usize,
}

fn group_order(p: u32, k: usize, budget: u128) -> Result<u128> {
    let order = (p as u128)
        .checked_pow(k as u32)
        .filter(|&o| o <= budget)
        .ok_or_else(|| {
            Error::Resource(format!(
                "group of order {p}^{k} exceeds the enumeration budget {budget}"
            ))
        })?;
    Ok(order)
}

/// Matrix of `σ_E = Σ_{g ∈ E} g`, computed as `Π_i (1 + A_i + ... + A_i^{p-1})`.
pub fn sigma_matrix(gens: &[DenseMatrix], budget: u128) -> Result<DenseMatrix> {
    let dim = check_generators(gens)?;
    let field = gens[0].field().clone();
    let p = field.characteristic();
    group_order(p, gens.len(), budget)?;
    let mut acc: Option<DenseMatrix> = None;
    for a in gens {
        let mut s = DenseMatrix::identity(field.clone(), dim);
        let mut power = DenseMatrix::identity(field.clone(), dim);
        for _ in 1..p {
            power = power.mul(a)?;
            s.add_scaled(1, &power)?;
        }
        acc = Some(match acc {
            None => s,
            Some(m) => m.mul(&s)?,
        });
    }
    Ok(acc.expect("nonempty"))
}

/// Free-summand count `rank(σ_E)` and the dimension of the projective-free part.
pub fn sigma_rank(gens: &[DenseMatrix], budget: u128) -> Result<SigmaSummary> {
    let dim = check_generators(gens)?;
    let p = gens[0].field().characteristic();
    let order = group_order(p, gens.len(), budget)? as usize;
    let free_count = sigma_matrix(gens, budget)?.rank();
    let pf_dim = dim
        .checked_sub(order * free_count)
        .ok_or_else(|| Error::internal(format!("{free_count} free summands of rank {order} exceed dim {dim}")))?;
    Ok(SigmaSummary { free_count, pf_dim })
}

/// Action of `E` on `M / F`, where `F` is a free submodule with
/// `rank(σ_E)` generators. `F` is injective, so `M ≅ F ⊕ M/F` and both have
/// the same rank variety.
#[derive(Clone, Debug)]
pub struct ProjectiveFreePart {
    pub matrices: Vec<DenseMatrix>,
    pub sigma: SigmaSummary,
}

pub fn projective_free_part(gens: &[DenseMatrix], budget: u128) -> Result<ProjectiveFreePart> {
    let dim = check_generators(gens)?;
    let field = gens[0].field().clone();
    let p = field.characteristic();
    let order = group_order(p, gens.len(), budget)? as usize;
    let sigma = sigma_matrix(gens, budget)?;
    let (_, generators) = sigma.rref();
    let free_count = generators.len();
    let pf_dim = dim
        .checked_sub(order * free_count)
        .ok_or_else(|| Error::internal("free part larger than the module"))?;
    let summary = SigmaSummary { free_count, pf_dim };
    if free_count == 0 {
        return Ok(ProjectiveFreePart {
            matrices: gens.to_vec(),
            sigma: summary,
        });
    }
    let nilps = gens.iter().map(|a| a.minus_identity()).collect::<Result<Vec<_>>>()?;
    // Columns Π B_i^{a_i} e_c span the free submodule generated by the e_c.
    let mut span = DenseMatrix::identity(field.clone(), dim).select_cols(&generators);
    for b in &nilps {
        let mut block = span.clone();
        let mut all = span.clone();
        for _ in 1..p {
            block = b.mul(&block)?;
            all = all.hconcat(&block)?;
        }
        span = all;
    }
    let (reduced, pivots) = span.transpose().rref();
    if pivots.len() != order * free_count {
        return Err(Error::internal(format!(
            "free submodule has dimension {} instead of {}",
            pivots.len(),
            order * free_count
        )));
    }
    let mut is_pivot = vec![false; dim];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let rest: Vec<usize> = (0..dim).filter(|&j| !is_pivot[j]).collect();
    let basis_rows: Vec<usize> = (0..pivots.len()).collect();
    // Reducing A e_j (j outside the pivots) modulo F leaves
    // A[rest, j] - R[:, rest]^T A[pivots, j].
    let r_rest_t = reduced.submatrix(&basis_rows, &rest).transpose();
    let matrices = gens
        .iter()
        .map(|a| {
            let top = a.submatrix(&pivots, &rest);
            a.submatrix(&rest, &rest).sub(&r_rest_t.mul(&top)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectiveFreePart {
        matrices,
        sigma: summary,
    })
}
