//! Complexity of `Lie(n)`: the maximum over maximal elementary abelian
//! `p`-subgroups `E` of `dim V^#_E(Lie(n))`, bounded above by `ν_p(n)`.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{LieRepresentation, Provenance, ResourceLimits};
use crate::perm::{is_prime, maximal_elem_abelians, regular_elem_abelian, ElemAbelianSubgroup};
use crate::variety::{
    analyze, sigma_rank, ChartResult, DimensionCap, DimensionSummary, GenericOutcome, Mode, SigmaSummary,
    VarietyAnalysis, VarietyConfig,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `m` with `p^m | n`.
pub fn valuation_bound(n: usize, p: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let (mut n, p, mut m) = (n, p as usize, 0);
    while n % p == 0 {
        n /= p;
        m += 1;
    }
    Ok(m)
}

#[derive(Clone, Debug, Default)]
pub struct ComplexityOptions {
    pub limits: ResourceLimits,
    pub variety: VarietyConfig,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupEntry {
    pub shape: String,
    pub rank: usize,
    pub summary: DimensionSummary,
    /// Cap from the last factor's rank, when one applied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaSummary>,
    pub matrices_built: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedTrue,
    CertifiedFalse,
    EvidenceOnly,
}

/// Whether `V^#_{E_m}(Lie(p^m))` is all of `F^m`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRecord {
    pub m: u32,
    pub p: u32,
    pub n: usize,
    pub verdict: Verdict,
    pub dimension: DimensionSummary,
    pub charts: Vec<ChartResult>,
    pub points_tested: usize,
    pub member_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerValue {
    pub i: u32,
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    pub certified: bool,
}

/// `c(Lie(p^m k))` against `max_i c(Lie(p^i))`.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyRecord {
    pub powers: Vec<PowerValue>,
    pub expected: [usize; 2],
    pub found: [usize; 2],
    /// `None` when the brackets overlap but are not both points.
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityCertificate {
    pub schema: u32,
    pub n: usize,
    pub p: u32,
    pub m: u32,
    pub bound_from_theorem: u32,
    pub subgroups: Vec<SubgroupEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[usize; 2]>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjecture: Option<ConjectureRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyRecord>,
    pub notes: Vec<String>,
}

impl ComplexityCertificate {
    /// `[lower, upper]`, collapsed when certified.
    pub fn range(&self) -> [usize; 2] {
        match (self.value, self.bracket) {
            (Some(v), _) => [v, v],
            (None, Some(b)) => b,
            (None, None) => [0, 0],
        }
    }
}

/// Options with the engine forced into the full pipeline.
fn full_mode(opts: &ComplexityOptions) -> ComplexityOptions {
    let mut o = opts.clone();
    o.variety.mode = Mode::Full;
    o.variety.alpha = None;
    o
}

fn build(n: usize, p: u32, e: &ElemAbelianSubgroup, opts: &ComplexityOptions) -> Result<(LieRepresentation, usize)> {
    let rep = LieRepresentation::build_cached(n, p, e.generators(), opts.limits, opts.cache_dir.as_deref())?;
    let built = match rep.provenance() {
        Provenance::Built => rep.matrices().len(),
        Provenance::CacheHit => 0,
    };
    Ok((rep, built))
}

/// Runs the engine in `opts.variety.mode` on one subgroup from
/// [`maximal_elem_abelians`], taking the point-stabilizer shortcut when
/// `p ∤ n` (no analysis is returned then) and capping the dimension by the
/// last factor's rank when `p | n`.
pub fn subgroup_analysis(
    n: usize,
    p: u32,
    e: &ElemAbelianSubgroup,
    opts: &ComplexityOptions,
) -> Result<(SubgroupEntry, Option<VarietyAnalysis>)> {
    let shape = e.shape().to_string();
    if e.degree() != n || e.prime() != p {
        return Err(Error::invalid(format!(
            "subgroup {shape} does not live in S_{n} at p = {p}"
        )));
    }
    if n % p as usize != 0 {
        // The normal form leaves the last point fixed, so E ⊆ S_{n-1} and
        // Lie(n) is free over it.
        if e.max_moved_point() >= n {
            return Err(Error::internal(format!(
                "shape {shape} moves point {n} although p does not divide n"
            )));
        }
        let entry = SubgroupEntry {
            shape,
            rank: e.rank(),
            summary: DimensionSummary::certified(0, "point-stabilizer"),
            cap: None,
            sigma: None,
            matrices_built: 0,
        };
        return Ok((entry, None));
    }
    let (rep, built) = build(n, p, e, opts)?;
    let mats = rep.matrices();
    let (head, r_t) = e.split_last_factor();
    let mut cfg = opts.variety.clone();
    let mut cap = None;
    if !head.is_empty() {
        let s = sigma_rank(&mats[..head.len()], cfg.group_order_budget)?;
        if s.pf_dim != 0 {
            return Err(Error::internal(format!(
                "Lie({n}) is not projective on the first {} generators of {shape}, which fix point {n}",
                head.len()
            )));
        }
        cfg.cap = Some(DimensionCap {
            value: r_t,
            source: "product-bound".into(),
        });
        cap = Some(r_t);
    }
    let analysis = analyze(mats, &cfg)?;
    if analysis.dimension.upper > r_t {
        return Err(Error::internal(format!(
            "{shape}: dimension bracket upper end {} exceeds the last factor rank {r_t}",
            analysis.dimension.upper
        )));
    }
    let entry = SubgroupEntry {
        shape,
        rank: e.rank(),
        summary: analysis.dimension.clone(),
        cap,
        sigma: analysis.sigma,
        matrices_built: built,
    };
    Ok((entry, Some(analysis)))
}

/// Dimension summary of `V^#_E(Lie(n))` for one subgroup from
/// [`maximal_elem_abelians`].
pub fn subgroup_complexity(
    n: usize,
    p: u32,
    e: &ElemAbelianSubgroup,
    opts: &ComplexityOptions,
) -> Result<SubgroupEntry> {
    Ok(subgroup_analysis(n, p, e, &full_mode(opts))?.0)
}

/// Combines per-subgroup entries by taking the maximum of their brackets.
pub fn combine(n: usize, p: u32, subgroups: Vec<SubgroupEntry>) -> Result<ComplexityCertificate> {
    let m = valuation_bound(n, p)?;
    let lower = subgroups.iter().map(|s| s.summary.lower).max().unwrap_or(0);
    let upper = subgroups.iter().map(|s| s.summary.upper).max().unwrap_or(0);
    if upper > m as usize || lower > upper {
        return Err(Error::internal(format!(
            "complexity bracket [{lower}, {upper}] violates the bound m = {m} for Lie({n}) at p = {p}"
        )));
    }
    let mut notes = Vec::new();
    if subgroups.is_empty() {
        notes.push(format!("S_{n} has trivial Sylow {p}-subgroup"));
    }
    let certified = lower == upper;
    let estimate = if certified {
        None
    } else {
        let e = subgroups
            .iter()
            .map(|s| s.summary.estimate.or(s.summary.value).unwrap_or(s.summary.lower))
            .max()
            .unwrap_or(0);
        notes.push(format!("uncertified: true value lies in [{lower}, {upper}]"));
        Some(e.clamp(lower, upper))
    };
    Ok(ComplexityCertificate {
        schema: SCHEMA_VERSION,
        n,
        p,
        m,
        bound_from_theorem: m,
        subgroups,
        value: certified.then_some(lower),
        bracket: (!certified).then_some([lower, upper]),
        certified,
        estimate,
        conjecture: None,
        consistency: None,
        notes,
    })
}

fn conjecture_from(m: u32, p: u32, n: usize, analysis: &VarietyAnalysis) -> ConjectureRecord {
    let any_full = analysis.generic.iter().any(|c| c.outcome == GenericOutcome::Full);
    let free_point = analysis.points.iter().any(|r| !r.member);
    let proper = analysis.generic.iter().any(|c| c.outcome == GenericOutcome::Proper);
    let verdict = if any_full && !free_point {
        Verdict::CertifiedTrue
    } else if proper || free_point {
        Verdict::CertifiedFalse
    } else {
        Verdict::EvidenceOnly
    };
    ConjectureRecord {
        m,
        p,
        n,
        verdict,
        dimension: analysis.dimension.clone(),
        charts: analysis.generic.clone(),
        points_tested: analysis.points.len(),
        member_points: analysis.points.iter().filter(|r| r.member).count(),
    }
}

/// `c_{S_n}(Lie(n))` over `GF(p)`. For `n = p^m` the run on `E_m` also
/// settles the equality case of the bound, recorded as `conjecture`.
pub fn assemble(n: usize, p: u32, opts: &ComplexityOptions) -> Result<ComplexityCertificate> {
    let m = valuation_bound(n, p)?;
    if m > 0 {
        opts.limits.check(n, p)?;
    }
    let subgroups = maximal_elem_abelians(n, p)?;
    let opts = &full_mode(opts);
    let runs: Vec<(SubgroupEntry, Option<VarietyAnalysis>)> = subgroups
        .par_iter()
        .map(|e| subgroup_analysis(n, p, e, opts))
        .collect::<Result<_>>()?;
    let regular = (m > 0 && (p as usize).pow(m) == n).then(|| {
        let shape = m.to_string();
        runs.iter()
            .find(|(e, _)| e.shape == shape)
            .and_then(|(_, a)| a.as_ref())
            .map(|a| conjecture_from(m, p, n, a))
    });
    let mut cert = combine(n, p, runs.into_iter().map(|(e, _)| e).collect())?;
    cert.conjecture = regular.flatten();
    Ok(cert)
}

/// Whether `V^#_{E_m}(Lie(p^m)) = F^m`.
pub fn conjecture_check(m: u32, p: u32, opts: &ComplexityOptions) -> Result<ConjectureRecord> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let n = (p as usize)
        .checked_pow(m)
        .ok_or_else(|| Error::Resource(format!("{p}^{m} overflows")))?;
    if m == 0 {
        return Ok(ConjectureRecord {
            m,
            p,
            n,
            verdict: Verdict::CertifiedTrue,
            dimension: DimensionSummary::certified(0, "trivial-group"),
            charts: Vec::new(),
            points_tested: 0,
            member_points: 0,
        });
    }
    opts.limits.check(n, p)?;
    let e = regular_elem_abelian(m, p)?;
    let (rep, _) = build(n, p, &e, opts)?;
    let analysis = analyze(rep.matrices(), &full_mode(opts).variety)?;
    Ok(conjecture_from(m, p, n, &analysis))
}

/// Certificate for `n = p^m k` (`m >= 1`, `k > 1` prime to `p`) with the
/// comparison against `max_{1 <= i <= m} c(Lie(p^i))` attached.
pub fn p_power_consistency(n: usize, p: u32, opts: &ComplexityOptions) -> Result<ComplexityCertificate> {
    let m = valuation_bound(n, p)?;
    let pm = (p as usize).pow(m);
    if m == 0 || n == pm {
        return Err(Error::invalid(format!(
            "n = {n} must be p^m k with m >= 1 and k > 1 prime to p = {p}"
        )));
    }
    opts.limits.check(n, p)?;
    let powers = (1..=m)
        .map(|i| {
            let c = assemble((p as usize).pow(i), p, opts)?;
            let [lower, upper] = c.range();
            Ok(PowerValue {
                i,
                n: c.n,
                lower,
                upper,
                certified: c.certified,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cert = assemble(n, p, opts)?;
    let expected = [
        powers.iter().map(|v| v.lower).max().unwrap_or(0),
        powers.iter().map(|v| v.upper).max().unwrap_or(0),
    ];
    let found = cert.range();
    let agree = if found[1] < expected[0] || expected[1] < found[0] {
        Some(false)
    } else if found[0] == found[1] && expected[0] == expected[1] {
        Some(true)
    } else {
        None
    };
    cert.consistency = Some(ConsistencyRecord {
        powers,
        expected,
        found,
        agree,
    });
    Ok(cert)
}
