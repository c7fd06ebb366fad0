//! Command-line front end. [`run`] parses arguments, executes one command and
//! writes JSON or CSV to the given sink; the return value is the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::complexity::{
    assemble, conjecture_check, p_power_consistency, subgroup_analysis, ComplexityCertificate, ComplexityOptions,
    ConjectureRecord, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::group_algebra::{dsw_element, omega_square_check};
use crate::lie::{verify_dimension, ResourceLimits, ORACLE_MAX_DEGREE};
use crate::linalg::{Elem, MAX_EXT_DEGREE};
use crate::perm::{factorial, is_prime, maximal_elem_abelians, subgroup_for_shape, SubgroupShape};
use crate::variety::{Mode, VarietyConfig, VarietyReport};

#[derive(Parser, Debug)]
#[command(
    name = "liemod",
    version,
    about = "Rank varieties and complexity of the Lie module Lie(n) of S_n"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub out: OutputFormat,
    /// Directory for cached action matrices.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Lift the default size caps (up to n = 9).
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct NP {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension (n-1)! of Lie(n), checked against the regular module for n <= 7.
    Dim(NP),
    /// Support size of ω_n and the identity ω_n² = n ω_n.
    Omega(NP),
    /// Representatives of the maximal elementary abelian p-subgroups of S_n.
    Subgroups(NP),
    /// Rank variety of Lie(n) restricted to one or all maximal subgroups.
    Variety {
        #[command(flatten)]
        np: NP,
        /// Subgroup shape "r1,r2,..."; all shapes when omitted.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long, default_value = "full")]
        mode: String,
        /// Largest extension degree scanned, or the field of --alpha in point mode.
        #[arg(long)]
        ext: Option<u32>,
        /// Point-mode coordinates, comma separated field elements.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Complexity certificate for Lie(n).
    Complexity {
        #[command(flatten)]
        np: NP,
        #[arg(long)]
        ext: Option<u32>,
    },
    /// Whether the rank variety of Lie(p^m) on E_m is all of F^m.
    Conjecture {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        ext: Option<u32>,
    },
    /// Compares c(Lie(p^m k)) with max_i c(Lie(p^i)).
    Consistency {
        #[command(flatten)]
        np: NP,
        #[arg(long)]
        ext: Option<u32>,
    },
}

#[derive(Serialize)]
struct DimOutput {
    schema: u32,
    n: usize,
    p: u32,
    dim: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

#[derive(Serialize)]
struct OmegaOutput {
    schema: u32,
    n: usize,
    p: u32,
    support: usize,
    n_mod_p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<String>,
    square_is_zero: bool,
    pass: bool,
}

#[derive(Serialize)]
struct SubgroupRecord {
    shape: String,
    rank: usize,
    order: u128,
    support_blocks: Vec<(usize, usize)>,
    generators: Vec<String>,
}

#[derive(Serialize)]
struct SubgroupsOutput {
    schema: u32,
    n: usize,
    p: u32,
    subgroups: Vec<SubgroupRecord>,
}

#[derive(Serialize)]
struct VarietyOutput {
    schema: u32,
    #[serde(flatten)]
    report: VarietyReport,
}

#[derive(Serialize)]
struct VarietiesOutput {
    schema: u32,
    n: usize,
    p: u32,
    reports: Vec<VarietyReport>,
}

#[derive(Serialize)]
struct ConjectureOutput {
    schema: u32,
    #[serde(flatten)]
    record: ConjectureRecord,
}

/// A command result: rendered JSON plus a flat table for CSV output.
struct Output {
    json: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Output {
    fn new(value: &impl Serialize, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Result<Self> {
        let json = serde_json::to_string_pretty(value).map_err(|e| Error::internal(format!("serialization: {e}")))?;
        Ok(Output { json, header, rows })
    }

    fn write(&self, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => writeln!(out, "{}", self.json),
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
        }
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn check_np(n: usize, p: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("p = {p} is not prime")));
    }
    Ok(())
}

fn check_ext(e: u32) -> Result<u32> {
    if e == 0 || e > MAX_EXT_DEGREE {
        return Err(Error::invalid(format!(
            "--ext must be in 1..={MAX_EXT_DEGREE}, got {e}"
        )));
    }
    Ok(e)
}

fn options(cli: &Cli, ext: Option<u32>) -> Result<ComplexityOptions> {
    let mut variety = VarietyConfig::default();
    if let Some(e) = ext {
        variety.e_max = check_ext(e)?;
    }
    Ok(ComplexityOptions {
        limits: ResourceLimits { force: cli.force },
        variety,
        cache_dir: cli.cache_dir.clone(),
    })
}

fn cmd_dim(n: usize, p: u32) -> Result<Output> {
    check_np(n, p)?;
    let dim = factorial(n - 1).ok_or_else(|| Error::invalid(format!("(n-1)! overflows for n = {n}")))? as u64;
    let verified = if n <= ORACLE_MAX_DEGREE {
        let ok = verify_dimension(n, p)?;
        if !ok {
            return Err(Error::internal(format!(
                "regular-module span of Lie({n}) is not {dim}-dimensional"
            )));
        }
        Some(ok)
    } else {
        None
    };
    let o = DimOutput {
        schema: SCHEMA_VERSION,
        n,
        p,
        dim,
        verified,
    };
    let row = vec![
        n.to_string(),
        p.to_string(),
        dim.to_string(),
        verified.map_or(String::new(), |v| v.to_string()),
    ];
    Output::new(&o, vec!["n", "p", "dim", "verified"], vec![row])
}

fn cmd_omega(n: usize, p: u32) -> Result<Output> {
    check_np(n, p)?;
    let omega = dsw_element(n, p)?;
    let pass = omega_square_check(n, p)?;
    if !pass {
        return Err(Error::internal(format!("ω_{n}² ≠ {n} ω_{n} over GF({p})")));
    }
    let n_mod_p = n % p as usize;
    let o = OmegaOutput {
        schema: SCHEMA_VERSION,
        n,
        p,
        support: omega.support_size(),
        n_mod_p,
        omega: (omega.support_size() <= 24).then(|| omega.to_string()),
        square_is_zero: n_mod_p == 0,
        pass,
    };
    let row = vec![
        n.to_string(),
        p.to_string(),
        o.support.to_string(),
        n_mod_p.to_string(),
        pass.to_string(),
    ];
    Output::new(&o, vec!["n", "p", "support", "n_mod_p", "pass"], vec![row])
}

fn cmd_subgroups(n: usize, p: u32) -> Result<Output> {
    check_np(n, p)?;
    let subgroups: Vec<SubgroupRecord> = maximal_elem_abelians(n, p)?
        .iter()
        .map(|e| SubgroupRecord {
            shape: e.shape().to_string(),
            rank: e.rank(),
            order: e.order(),
            support_blocks: e.support_blocks().to_vec(),
            generators: e.generators().iter().map(|g| g.to_string()).collect(),
        })
        .collect();
    let rows = subgroups
        .iter()
        .map(|s| {
            vec![
                s.shape.clone(),
                s.rank.to_string(),
                s.order.to_string(),
                s.generators.join(" "),
            ]
        })
        .collect();
    let o = SubgroupsOutput {
        schema: SCHEMA_VERSION,
        n,
        p,
        subgroups,
    };
    Output::new(&o, vec!["shape", "rank", "order", "generators"], rows)
}

fn parse_alpha(text: &str) -> Result<Vec<Elem>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<Elem>()
                .map_err(|_| Error::invalid(format!("bad --alpha entry {t:?}")))
        })
        .collect()
}

fn cmd_variety(
    cli: &Cli,
    np: NP,
    shape: Option<&str>,
    mode: &str,
    ext: Option<u32>,
    alpha: Option<&str>,
) -> Result<Output> {
    let NP { n, p } = np;
    check_np(n, p)?;
    let mode: Mode = mode.parse()?;
    let mut opts = options(cli, if mode == Mode::Point { None } else { ext })?;
    opts.variety.mode = mode;
    match (mode, alpha) {
        (Mode::Point, Some(a)) => opts.variety.alpha = Some((parse_alpha(a)?, check_ext(ext.unwrap_or(1))?)),
        (Mode::Point, None) => return Err(Error::invalid("point mode needs --alpha")),
        (_, Some(_)) => return Err(Error::invalid("--alpha is only used in point mode")),
        (_, None) => {}
    }
    let subgroups = match shape {
        Some(s) => vec![subgroup_for_shape(n, &SubgroupShape::parse(s, p)?)?],
        None => maximal_elem_abelians(n, p)?,
    };
    if let (Mode::Point, Some((a, _))) = (mode, &opts.variety.alpha) {
        if let Some(e) = subgroups.iter().find(|e| e.rank() != a.len()) {
            return Err(Error::invalid(format!(
                "--alpha has {} entries but shape {} has rank {}",
                a.len(),
                e.shape(),
                e.rank()
            )));
        }
    }
    let dim = factorial(n - 1).ok_or_else(|| Error::invalid(format!("(n-1)! overflows for n = {n}")))?;
    let reports = subgroups
        .iter()
        .map(|e| {
            let (entry, analysis) = subgroup_analysis(n, p, e, &opts)?;
            let analysis = analysis.unwrap_or(crate::variety::VarietyAnalysis {
                points: Vec::new(),
                sigma: None,
                generic: Vec::new(),
                dimension: entry.summary,
            });
            Ok(VarietyReport::new(n, p, entry.shape, e.rank(), dim, mode, analysis))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for r in &reports {
        for pt in &r.points {
            rows.push(vec![
                r.shape.clone(),
                join(&pt.alpha, " "),
                pt.e.to_string(),
                pt.rank.to_string(),
                pt.member.to_string(),
            ]);
        }
    }
    let header = vec!["shape", "alpha", "e", "rank", "member"];
    if shape.is_some() {
        let report = reports.into_iter().next().expect("one subgroup");
        Output::new(
            &VarietyOutput {
                schema: SCHEMA_VERSION,
                report,
            },
            header,
            rows,
        )
    } else {
        Output::new(
            &VarietiesOutput {
                schema: SCHEMA_VERSION,
                n,
                p,
                reports,
            },
            header,
            rows,
        )
    }
}

fn certificate_rows(c: &ComplexityCertificate) -> Vec<Vec<String>> {
    c.subgroups
        .iter()
        .map(|s| {
            vec![
                c.n.to_string(),
                c.p.to_string(),
                s.shape.clone(),
                s.rank.to_string(),
                s.summary.lower.to_string(),
                s.summary.upper.to_string(),
                s.summary.certified.to_string(),
                s.summary.method.clone(),
            ]
        })
        .collect()
}

const CERT_HEADER: [&str; 8] = ["n", "p", "shape", "rank", "lower", "upper", "certified", "method"];

fn cmd_complexity(cli: &Cli, np: NP, ext: Option<u32>) -> Result<Output> {
    check_np(np.n, np.p)?;
    let c = assemble(np.n, np.p, &options(cli, ext)?)?;
    Output::new(&c, CERT_HEADER.to_vec(), certificate_rows(&c))
}

fn cmd_conjecture(cli: &Cli, m: u32, p: u32, ext: Option<u32>) -> Result<Output> {
    check_np(1, p)?;
    let record = conjecture_check(m, p, &options(cli, ext)?)?;
    let row = vec![
        m.to_string(),
        p.to_string(),
        record.n.to_string(),
        serde_json::to_value(record.verdict)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        record.dimension.lower.to_string(),
        record.dimension.upper.to_string(),
    ];
    let o = ConjectureOutput {
        schema: SCHEMA_VERSION,
        record,
    };
    Output::new(&o, vec!["m", "p", "n", "verdict", "lower", "upper"], vec![row])
}

fn cmd_consistency(cli: &Cli, np: NP, ext: Option<u32>) -> Result<Output> {
    check_np(np.n, np.p)?;
    let c = p_power_consistency(np.n, np.p, &options(cli, ext)?)?;
    let record = c.consistency.as_ref().expect("consistency attached");
    if record.agree == Some(false) {
        return Err(Error::internal(format!(
            "c(Lie({})) in {:?} disagrees with max_i c(Lie({}^i)) in {:?}",
            np.n, record.found, np.p, record.expected
        )));
    }
    let mut rows: Vec<Vec<String>> = record
        .powers
        .iter()
        .map(|v| {
            vec![
                v.n.to_string(),
                v.lower.to_string(),
                v.upper.to_string(),
                v.certified.to_string(),
            ]
        })
        .collect();
    let [lo, hi] = c.range();
    rows.push(vec![
        c.n.to_string(),
        lo.to_string(),
        hi.to_string(),
        c.certified.to_string(),
    ]);
    Output::new(&c, vec!["n", "lower", "upper", "certified"], rows)
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Dim(np) => cmd_dim(np.n, np.p),
        Command::Omega(np) => cmd_omega(np.n, np.p),
        Command::Subgroups(np) => cmd_subgroups(np.n, np.p),
        Command::Variety {
            np,
            shape,
            mode,
            ext,
            alpha,
        } => cmd_variety(cli, *np, shape.as_deref(), mode, *ext, alpha.as_deref()),
        Command::Complexity { np, ext } => cmd_complexity(cli, *np, *ext),
        Command::Conjecture { m, p, ext } => cmd_conjecture(cli, *m, *p, *ext),
        Command::Consistency { np, ext } => cmd_consistency(cli, *np, *ext),
    }
}

/// Runs one invocation; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::invalid("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::internal(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    match output.write(cli.out, out) {
        Ok(()) => 0,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "error: writing output: {e}");
            1
        }
    }
}
