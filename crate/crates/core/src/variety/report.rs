use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::engine::{
    projective_free_part, scan, scan_reduced, test_point, PointRecord, SigmaSummary, DEFAULT_GROUP_ORDER_BUDGET,
    DEFAULT_POINT_BUDGET,
};
use super::generic::{chart_memberships, minor_vanishes, ChartResult, GenericConfig, GenericOutcome};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Elem, FieldContext, MAX_EXT_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Point,
    Scan,
    Generic,
    Sigma,
    Full,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "point" => Mode::Point,
            "scan" => Mode::Scan,
            "generic" => Mode::Generic,
            "sigma" => Mode::Sigma,
            "full" => Mode::Full,
            other => return Err(Error::invalid(format!("unknown mode {other:?}"))),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Point => "point",
            Mode::Scan => "scan",
            Mode::Generic => "generic",
            Mode::Sigma => "sigma",
            Mode::Full => "full",
        })
    }
}

/// An upper bound on the variety's dimension established outside the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionCap {
    pub value: usize,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct VarietyConfig {
    pub mode: Mode,
    pub e_max: u32,
    /// Point-mode parameter and the extension degree its entries live in.
    pub alpha: Option<(Vec<Elem>, u32)>,
    pub point_budget: u128,
    pub group_order_budget: u128,
    pub generic: GenericConfig,
    pub cap: Option<DimensionCap>,
}

impl Default for VarietyConfig {
    fn default() -> Self {
        VarietyConfig {
            mode: Mode::Full,
            e_max: 2,
            alpha: None,
            point_budget: DEFAULT_POINT_BUDGET,
            group_order_budget: DEFAULT_GROUP_ORDER_BUDGET,
            generic: GenericConfig::default(),
            cap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionSummary {
    pub value: Option<usize>,
    pub certified: bool,
    pub method: String,
    pub lower: usize,
    pub upper: usize,
    /// Point-count extrapolation, present only for uncertified summaries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<usize>,
}

impl DimensionSummary {
    pub fn certified(value: usize, method: impl Into<String>) -> Self {
        DimensionSummary {
            value: Some(value),
            certified: true,
            method: method.into(),
            lower: value,
            upper: value,
            estimate: None,
        }
    }
}

/// Everything the engine established about one module and subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct VarietyAnalysis {
    pub points: Vec<PointRecord>,
    pub sigma: Option<SigmaSummary>,
    pub generic: Vec<ChartResult>,
    pub dimension: DimensionSummary,
}

/// Combines the available evidence into a dimension bracket.
///
/// Lower bounds: some chart generically full (`k`), a member point or a
/// non-free σ-count (`1`). Upper bounds: some chart generically proper
/// (`k - 1`), σ shows the module free (`0`), an external cap.
pub fn dimension_summary(
    k: usize,
    points: &[PointRecord],
    sigma: Option<SigmaSummary>,
    generic: &[ChartResult],
    cap: Option<&DimensionCap>,
) -> Result<DimensionSummary> {
    let any_full = generic.iter().any(|c| c.outcome == GenericOutcome::Full);
    let any_proper = generic.iter().any(|c| c.outcome == GenericOutcome::Proper);
    if any_full && any_proper {
        return Err(Error::internal("one chart is generically full and another proper"));
    }
    if any_full {
        if let Some(r) = points.iter().find(|r| !r.member) {
            return Err(Error::internal(format!(
                "a chart is generically full but {:?} is a free point",
                r.alpha
            )));
        }
    }
    let any_member = points.iter().any(|r| r.member);
    let sigma_free = sigma.is_some_and(|s| s.pf_dim == 0);
    let sigma_nonfree = sigma.is_some_and(|s| s.pf_dim > 0);

    if sigma_free && (any_member || any_full) {
        return Err(Error::internal(
            "σ-count says the module is projective but a member point or full chart was found",
        ));
    }

    let (lower, lower_src) = if any_full {
        (k, "generic-charts")
    } else if any_member {
        (1, "member-points")
    } else if sigma_nonfree {
        (1, "sigma-nonfree")
    } else {
        (0, "none")
    };
    let mut upper = (k, "rank");
    if any_proper {
        upper = (k - 1, "generic-charts");
    }
    if let Some(c) = cap {
        if c.value < upper.0 {
            upper = (c.value, c.source.as_str());
        }
    }
    if sigma_free {
        upper = (0, "sigma-free");
    }
    if lower > upper.0 {
        return Err(Error::internal(format!(
            "dimension bounds contradict: lower {lower} ({lower_src}) > upper {} ({})",
            upper.0, upper.1
        )));
    }
    if lower == upper.0 {
        let method = if lower_src == upper.1 || lower_src == "none" {
            upper.1.to_string()
        } else if upper.1 == "rank" {
            lower_src.to_string()
        } else {
            format!("{lower_src}+{}", upper.1)
        };
        return Ok(DimensionSummary::certified(lower, method));
    }
    let p = points.first().map_or(2, |r| r.p);
    let estimate = point_count_estimate(points, p).clamp(lower, upper.0);
    Ok(DimensionSummary {
        value: None,
        certified: false,
        method: "heuristic".into(),
        lower,
        upper: upper.0,
        estimate: Some(estimate),
    })
}

/// `1 + slope` of `log(#member points)` against `log q` over the scanned
/// extensions, rounded; the projective member count grows like `q^{d-1}`.
fn point_count_estimate(points: &[PointRecord], p: u32) -> usize {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for r in points {
        *counts.entry(r.e).or_default() += usize::from(r.member);
    }
    let data: Vec<(f64, f64)> = counts
        .iter()
        .filter(|&(_, &c)| c > 0)
        .map(|(&e, &c)| (e as f64 * (p as f64).ln(), (c as f64).ln()))
        .collect();
    match data.len() {
        0 => 0,
        1 => 1,
        len => {
            let n = len as f64;
            let (mx, my) = data.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
            let (num, den) = data.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
                (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
            });
            1 + (num / den).max(0.0).round() as usize
        }
    }
}

/// Runs the engine in `cfg.mode` on the generator matrices of one subgroup.
pub fn analyze(gens: &[DenseMatrix], cfg: &VarietyConfig) -> Result<VarietyAnalysis> {
    let k = gens.len();
    if k == 0 {
        return Err(Error::invalid("at least one generator matrix is required"));
    }
    let p = gens[0].field().characteristic();
    let mut points = Vec::new();
    let mut sigma = None;
    let mut generic = Vec::new();

    if cfg.mode == Mode::Point {
        let (alpha, e) = cfg
            .alpha
            .clone()
            .ok_or_else(|| Error::invalid("point mode needs --alpha"))?;
        let field = FieldContext::get(p, e)?;
        points.push(test_point(gens, &alpha, &field)?);
    }
    if matches!(cfg.mode, Mode::Scan | Mode::Full) && (cfg.e_max == 0 || cfg.e_max > MAX_EXT_DEGREE) {
        return Err(Error::invalid(format!(
            "extension degree {} outside 1..={MAX_EXT_DEGREE}",
            cfg.e_max
        )));
    }
    if cfg.mode == Mode::Scan {
        for e in 1..=cfg.e_max {
            points.extend(scan(gens, p, e, cfg.point_budget)?);
        }
    }
    if matches!(cfg.mode, Mode::Sigma | Mode::Generic | Mode::Full) {
        let reduced = projective_free_part(gens, cfg.group_order_budget)?;
        sigma = Some(reduced.sigma);
        if cfg.mode == Mode::Full {
            for e in 1..=cfg.e_max {
                points.extend(scan_reduced(gens, &reduced, e, cfg.point_budget)?);
            }
        }
        if matches!(cfg.mode, Mode::Generic | Mode::Full) {
            generic = chart_memberships(&reduced.matrices, &cfg.generic)?;
            check_specialization(&reduced.matrices, &points, &generic)?;
        }
    }
    let dimension = dimension_summary(k, &points, sigma, &generic, cfg.cap.as_ref())?;
    Ok(VarietyAnalysis {
        points,
        sigma,
        generic,
        dimension,
    })
}

/// Member points on a chart certified proper must make its witness minor vanish.
fn check_specialization(reduced: &[DenseMatrix], points: &[PointRecord], generic: &[ChartResult]) -> Result<()> {
    let p = match reduced.first() {
        Some(m) => m.field().characteristic(),
        None => return Ok(()),
    };
    for chart in generic {
        let Some(w) = &chart.witness else { continue };
        let j = chart.chart - 1;
        for r in points.iter().filter(|r| r.member && r.alpha[j] != 0) {
            let field = FieldContext::get(p, r.e)?;
            let inv = field.inv_nonzero(r.alpha[j]);
            let alpha: Vec<Elem> = r.alpha.iter().map(|&x| field.mul(x, inv)).collect();
            if !minor_vanishes(reduced, w, &alpha, &field)? {
                return Err(Error::internal(format!(
                    "member point {:?} does not annihilate the certifying minor of chart {}",
                    r.alpha, chart.chart
                )));
            }
        }
    }
    Ok(())
}

/// Serialized result of one variety run on `Lie(n)` restricted to a subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct VarietyReport {
    pub n: usize,
    pub p: u32,
    pub shape: String,
    pub rank: usize,
    pub dim: usize,
    pub mode: Mode,
    pub points: Vec<PointRecord>,
    pub sigma: Option<SigmaSummary>,
    pub generic: Vec<ChartResult>,
    pub dimension: DimensionSummary,
}

impl VarietyReport {
    pub fn new(n: usize, p: u32, shape: String, rank: usize, dim: usize, mode: Mode, a: VarietyAnalysis) -> Self {
        VarietyReport {
            n,
            p,
            shape,
            rank,
            dim,
            mode,
            points: a.points,
            sigma: a.sigma,
            generic: a.generic,
            dimension: a.dimension,
        }
    }
}
