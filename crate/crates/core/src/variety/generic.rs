//! Decides whether the generic point of the chart `α_j = 1` lies in the rank
//! variety. Membership is the vanishing of all `dim/p`-minors of
//! `N(t)^{p-1}`, a closed condition, so the generic verdict covers the whole
//! chart when positive and leaves a proper closed subset when negative.
//! The variety is a closed cone, so one full chart makes it all of `F^k`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{test_point, u_alpha_minus_one};
use super::points::affine_points;
use crate::error::{Error, Result};
use crate::linalg::{
    DenseMatrix, Elem, FieldContext, PolyMatrix, DEFAULT_DEGREE_CAP, DEFAULT_WORK_BUDGET, MAX_EXT_DEGREE,
    MAX_FIELD_DEGREE, MAX_ORDER,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericOutcome {
    /// The whole chart lies in the variety.
    Full,
    /// The variety meets the chart in a proper closed subset.
    Proper,
    /// Neither verdict could be established within the budgets.
    Aborted,
}

/// A point where `M` is free, with a nonsingular `dim/p`-minor of `N^{p-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub alpha: Vec<Elem>,
    pub e: u32,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartResult {
    /// 1-based index `j` of the chart `α_j = 1`.
    pub chart: usize,
    pub outcome: GenericOutcome,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ChartResult {
    pub fn member_generic(&self) -> Option<bool> {
        match self.outcome {
            GenericOutcome::Full => Some(true),
            GenericOutcome::Proper => Some(false),
            GenericOutcome::Aborted => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericConfig {
    pub degree_cap: u32,
    pub work_budget: u64,
    /// Largest extension degree searched for witness points.
    pub witness_max_e: u32,
    /// Largest number of chart points evaluated per extension degree.
    pub witness_point_budget: u64,
    /// Largest interpolation grid `S^{k-1}` evaluated for one chart.
    pub grid_point_budget: u64,
}

impl Default for GenericConfig {
    fn default() -> Self {
        GenericConfig {
            degree_cap: DEFAULT_DEGREE_CAP,
            work_budget: DEFAULT_WORK_BUDGET,
            witness_max_e: MAX_EXT_DEGREE,
            witness_point_budget: 4096,
            grid_point_budget: 50_000,
        }
    }
}

/// Chart point with `α_j = 1` and the remaining coordinates from `t`.
fn chart_alpha(j: usize, t: &[Elem]) -> Vec<Elem> {
    let mut alpha = Vec::with_capacity(t.len() + 1);
    alpha.extend_from_slice(&t[..j]);
    alpha.push(1);
    alpha.extend_from_slice(&t[j..]);
    alpha
}

fn witness_at(gens: &[DenseMatrix], alpha: Vec<Elem>, field: &Arc<FieldContext>) -> Result<Witness> {
    let p = field.characteristic();
    let n = u_alpha_minus_one(gens, &alpha, field)?;
    let (rows, cols) = n.pow(p - 1)?.rank_profile();
    Ok(Witness {
        alpha,
        e: field.degree(),
        rows,
        cols,
    })
}

/// Whether `witness.rows x witness.cols` of `N^{p-1}` is singular at `alpha`.
pub fn minor_vanishes(
    gens: &[DenseMatrix],
    witness: &Witness,
    alpha: &[Elem],
    field: &Arc<FieldContext>,
) -> Result<bool> {
    let p = field.characteristic();
    let n = u_alpha_minus_one(gens, alpha, field)?.pow(p - 1)?;
    let minor = n.submatrix(&witness.rows, &witness.cols);
    Ok(minor.rank() < witness.rows.len())
}

/// Generic membership on chart `j` (0-based).
///
/// Order of attempts: divisibility, a free witness point over `GF(p^e)`,
/// fraction-free elimination of `N(t)^{p-1}`, and finally the exhaustive-grid
/// bound (a nonzero polynomial of degree below `q` cannot vanish on all of
/// `GF(q)^s`).
pub fn generic_membership(gens: &[DenseMatrix], j: usize, cfg: &GenericConfig) -> Result<ChartResult> {
    let k = gens.len();
    if j >= k {
        return Err(Error::invalid(format!("chart {} outside 1..={k}", j + 1)));
    }
    let base = gens
        .first()
        .ok_or_else(|| Error::invalid("at least one generator matrix is required"))?
        .field()
        .clone();
    let p = base.characteristic();
    let dim = gens[0].rows();
    let chart = j + 1;
    let result = |outcome, method: &str, witness, note| ChartResult {
        chart,
        outcome,
        method: method.to_string(),
        witness,
        note,
    };
    if dim % p as usize != 0 {
        return Ok(result(GenericOutcome::Full, "dimension", None, None));
    }
    let s = k - 1;

    // Witness search; remembers the largest field on which the whole chart
    // grid was checked and found to lie in the variety.
    let mut grid_q = 0u32;
    let mut observed = 0usize;
    for e in 1..=cfg.witness_max_e {
        let q = (p as u64).pow(e);
        if q > MAX_ORDER as u64 {
            break;
        }
        let count = q.checked_pow(s as u32);
        if count.is_none_or(|c| c > cfg.witness_point_budget) {
            break;
        }
        let field = FieldContext::get(p, e)?;
        for t in affine_points(s, q as u32) {
            let alpha = chart_alpha(j, &t);
            let r = test_point(gens, &alpha, &field)?;
            observed = observed.max(r.rank);
            if !r.member {
                let w = witness_at(gens, alpha, &field)?;
                return Ok(result(GenericOutcome::Proper, "witness", Some(w), None));
            }
        }
        grid_q = q as u32;
        if s == 0 {
            return Ok(result(GenericOutcome::Full, "point", None, None));
        }
    }

    let target = dim / p as usize;
    let degree_bound = (p as usize - 1) * target;
    // Bareiss pivots reach degree about rank * (p - 1).
    let pivot_degree = observed * (p as usize - 1);
    let note = if pivot_degree > cfg.degree_cap as usize {
        Some(format!(
            "symbolic elimination skipped: chart points reach rank {observed}, so pivots near degree {pivot_degree} exceed the cap {}",
            cfg.degree_cap
        ))
    } else {
        match symbolic_rank(gens, j, cfg) {
            Ok(g) if g.rank >= target => {
                let w = Witness {
                    alpha: Vec::new(),
                    e: 0,
                    rows: g.rows,
                    cols: g.cols,
                };
                return Ok(result(GenericOutcome::Proper, "symbolic", Some(w), None));
            }
            Ok(_) => return Ok(result(GenericOutcome::Full, "symbolic", None, None)),
            Err(err @ (Error::DegreeCapExceeded { .. } | Error::WorkBudgetExceeded(_))) => {
                Some(format!("symbolic elimination aborted: {err}"))
            }
            Err(err) => return Err(err),
        }
    };
    if grid_q as usize > degree_bound {
        return Ok(result(GenericOutcome::Full, "exhaustive-grid", None, note));
    }
    let note = format!(
        "{}; minors have degree up to {degree_bound}, grid checked only up to GF({grid_q})",
        note.unwrap_or_default()
    );
    Ok(result(GenericOutcome::Aborted, "none", None, Some(note)))
}

/// Smallest `GF(p^e)` with more than `degree_bound` elements.
fn grid_field(p: u32, degree_bound: usize) -> Option<u32> {
    (1..=MAX_FIELD_DEGREE)
        .take_while(|&e| (p as u64).pow(e) <= MAX_ORDER as u64)
        .find(|&e| (p as u64).pow(e) > degree_bound as u64)
}

/// Chart `j` (0-based) by evaluation on `S^{k-1}` with `S` the first
/// `D + 1` elements of a large enough `GF(p^e)`, `D` the degree bound of the
/// `dim/p`-minors of `N(t)^{p-1}`. A nonzero minor has degree at most `D` in
/// each variable, so it cannot vanish on the whole grid.
pub fn subset_grid_membership(gens: &[DenseMatrix], j: usize, cfg: &GenericConfig) -> Result<ChartResult> {
    let k = gens.len();
    if j >= k {
        return Err(Error::invalid(format!("chart {} outside 1..={k}", j + 1)));
    }
    let p = gens[0].field().characteristic();
    let dim = gens[0].rows();
    let chart = j + 1;
    let aborted = |note: String| ChartResult {
        chart,
        outcome: GenericOutcome::Aborted,
        method: "none".into(),
        witness: None,
        note: Some(note),
    };
    if dim % p as usize != 0 {
        return Ok(ChartResult {
            chart,
            outcome: GenericOutcome::Full,
            method: "dimension".into(),
            witness: None,
            note: None,
        });
    }
    let s = k - 1;
    let degree_bound = (p as usize - 1) * (dim / p as usize);
    let side = degree_bound as u64 + 1;
    let Some(e) = grid_field(p, degree_bound) else {
        return Ok(aborted(format!(
            "no supported field has more than {degree_bound} elements"
        )));
    };
    let count = side.checked_pow(s as u32).filter(|&c| c <= cfg.grid_point_budget);
    let Some(count) = count else {
        return Ok(aborted(format!(
            "interpolation grid {side}^{s} exceeds the budget of {} points",
            cfg.grid_point_budget
        )));
    };
    let field = FieldContext::get(p, e)?;
    let point = |idx: u64| {
        let mut t = vec![0; s];
        let mut rest = idx;
        for slot in t.iter_mut().rev() {
            *slot = (rest % side) as Elem;
            rest /= side;
        }
        chart_alpha(j, &t)
    };
    let first_free = (0..count)
        .into_par_iter()
        .map(|idx| test_point(gens, &point(idx), &field).map(|r| (idx, r.member)))
        .find_first(|r| !matches!(r, Ok((_, true))));
    match first_free {
        None => Ok(ChartResult {
            chart,
            outcome: GenericOutcome::Full,
            method: "subset-grid".into(),
            witness: None,
            note: Some(format!("{count} points over GF({})", field.order())),
        }),
        Some(Err(err)) => Err(err),
        Some(Ok((idx, _))) => Ok(ChartResult {
            chart,
            outcome: GenericOutcome::Proper,
            method: "subset-grid".into(),
            witness: Some(witness_at(gens, point(idx), &field)?),
            note: None,
        }),
    }
}

/// Generic membership on every chart. If no chart is decided, the undecided
/// ones are tried on the interpolation grid until one is full; a full chart
/// then decides all others.
pub fn chart_memberships(gens: &[DenseMatrix], cfg: &GenericConfig) -> Result<Vec<ChartResult>> {
    let k = gens.len();
    let mut charts = (0..k)
        .map(|j| generic_membership(gens, j, cfg))
        .collect::<Result<Vec<_>>>()?;
    let full = |cs: &[ChartResult]| cs.iter().position(|c| c.outcome == GenericOutcome::Full);
    let any_proper = charts.iter().any(|c| c.outcome == GenericOutcome::Proper);
    if full(&charts).is_none() && !any_proper {
        // Every chart is aborted here.
        for (j, chart) in charts.iter_mut().enumerate() {
            let grid = subset_grid_membership(gens, j, cfg)?;
            if grid.outcome == GenericOutcome::Aborted {
                let earlier = chart.note.take().unwrap_or_default();
                let later = grid.note.unwrap_or_default();
                chart.note = Some(format!("{earlier}; {later}"));
                continue;
            }
            let decided = grid.outcome == GenericOutcome::Full;
            *chart = grid;
            if decided {
                break;
            }
        }
    }
    if let Some(i) = full(&charts) {
        if let Some(c) = charts.iter().find(|c| c.outcome == GenericOutcome::Proper) {
            return Err(Error::internal(format!(
                "chart {} is full but chart {} is proper",
                charts[i].chart, c.chart
            )));
        }
        let source = charts[i].chart;
        for c in charts.iter_mut().filter(|c| c.outcome == GenericOutcome::Aborted) {
            c.outcome = GenericOutcome::Full;
            c.method = "implied".into();
            c.note = Some(format!("chart {source} is full and the variety is closed"));
        }
    }
    Ok(charts)
}

fn symbolic_rank(gens: &[DenseMatrix], j: usize, cfg: &GenericConfig) -> Result<crate::linalg::GenericRank> {
    let p = gens[0].field().characteristic();
    let nilps = gens.iter().map(|a| a.minus_identity()).collect::<Result<Vec<_>>>()?;
    let terms: Vec<(usize, &DenseMatrix)> = nilps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(i, b)| (if i < j { i } else { i - 1 }, b))
        .collect();
    let n = PolyMatrix::pencil(&nilps[j], gens.len() - 1, &terms)?.with_degree_cap(cfg.degree_cap)?;
    n.pow(p - 1)?.generic_rank_profile(cfg.work_budget)
}
