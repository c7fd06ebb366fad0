//! One PASS/FAIL line per acceptance criterion, written straight to stdout so
//! the lines survive output capture. Criteria run one at a time so the
//! runtime budgets measure each criterion alone.

use std::error::Error;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use liemod::complexity::{assemble, p_power_consistency, subgroup_analysis, ComplexityOptions, Verdict};
use liemod::group_algebra::{dsw_element, omega_square_check, straighten};
use liemod::lie::{
    action_matrix, regular_span_rank, verify_free_over_point_stabilizer, LieRepresentation, ResourceLimits,
};
use liemod::linalg::{DenseMatrix, FieldContext};
use liemod::perm::{factorial, maximal_elem_abelians, regular_elem_abelian, Permutation};
use liemod::variety::{
    generic_membership, scan, sigma_rank, test_point, GenericConfig, GenericOutcome, Mode, PointRecord,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, Box<dyn Error>>;

const SEED: u64 = 0x05ee_d11e;
const MINUTE: Duration = Duration::from_secs(60);

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
    let _turn = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(Ok(d)) if start.elapsed() <= budget => (true, d),
        Ok(Ok(d)) => (false, format!("{d}; over the {}s budget", budget.as_secs())),
        Ok(Err(e)) => (false, e.to_string()),
        Err(_) => (false, "panicked".to_string()),
    };
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} {id:>2} {title} ({secs:.2}s): {detail}\n");
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "{}", line.trim_end());
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Box<dyn Error>> {
    if cond {
        Ok(())
    } else {
        Err(msg().into())
    }
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Permutation::from_images(&v).unwrap()
}

fn json(args: &[&str]) -> Result<serde_json::Value, Box<dyn Error>> {
    let mut argv = vec!["liemod"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = liemod::cli::run(argv, &mut out, &mut err);
    ensure(code == 0, || {
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err))
    })?;
    Ok(serde_json::from_slice(&out)?)
}

fn full_options() -> ComplexityOptions {
    let mut opts = ComplexityOptions::default();
    opts.variety.mode = Mode::Full;
    opts
}

fn lie_matrices(n: usize, p: u32, gens: &[Permutation]) -> Vec<DenseMatrix> {
    LieRepresentation::build(n, p, gens, ResourceLimits::default())
        .unwrap()
        .matrices()
        .to_vec()
}

#[test]
fn c01_dimension_formula() {
    criterion(1, "dimension formula", MINUTE, || {
        let mut checked = 0;
        for p in [2u32, 3, 5] {
            for n in 1..=7usize {
                let want = factorial(n - 1).unwrap();
                let v = json(&["dim", "--n", &n.to_string(), "--p", &p.to_string()])?;
                ensure(v["dim"] == want && v["verified"] == true, || {
                    format!("dim output {v} for n={n} p={p}")
                })?;
                let oracle = regular_span_rank(n, p)?;
                ensure(oracle == want, || {
                    format!("regular module span {oracle} != {want} for n={n} p={p}")
                })?;
                checked += 1;
            }
        }
        Ok(format!("{checked} (n, p) pairs equal (n-1)!"))
    });
}

#[test]
fn c02_dsw_identities() {
    criterion(2, "DSW identities", 2 * MINUTE, || {
        for p in [2u32, 3, 5] {
            for n in 1..=8 {
                ensure(omega_square_check(n, p)?, || {
                    format!("ω² != (n mod p)ω for n={n} p={p}")
                })?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut straightened = 0;
        for p in [2u32, 3, 5] {
            for n in 1..=7usize {
                let omega = dsw_element(n, p)?;
                let rhos: Vec<Permutation> = if n <= 5 {
                    (0..factorial(n).unwrap())
                        .map(|r| Permutation::from_lex_rank(r, n).unwrap())
                        .collect()
                } else {
                    (0..500).map(|_| random_perm(n, &mut rng)).collect()
                };
                for rho in &rhos {
                    let s = straighten(rho, p)?;
                    ensure(s.supported_on_point_stabilizer(), || {
                        format!("straighten({rho}) leaves S_{{n-1}}")
                    })?;
                    ensure(s.mul(&omega)? == omega.left_mul_perm(rho)?, || {
                        format!("straighten({rho}) ω != ρ ω at n={n} p={p}")
                    })?;
                    straightened += 1;
                }
            }
        }
        Ok(format!("ω² identities for n ≤ 8, {straightened} straightenings"))
    });
}

#[test]
fn c03_representation_property() {
    criterion(3, "representation property", 2 * MINUTE, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
        let l = ResourceLimits::default();
        let mut pairs = 0;
        for p in [2u32, 3] {
            for n in 1..=6 {
                for _ in 0..100 {
                    let (g, h) = (random_perm(n, &mut rng), random_perm(n, &mut rng));
                    let lhs = action_matrix(&g, p, l)?.mul(&action_matrix(&h, p, l)?)?;
                    ensure(lhs == action_matrix(&g.compose(&h)?, p, l)?, || {
                        format!("ρ({g})ρ({h}) != ρ({g}{h}) at n={n} p={p}")
                    })?;
                    pairs += 1;
                }
            }
        }
        Ok(format!("{pairs} pairs"))
    });
}

#[test]
fn c04_free_over_point_stabilizer() {
    criterion(4, "freeness over S_(n-1)", 5 * MINUTE, || {
        for p in [2u32, 3, 5] {
            for n in 1..=7 {
                ensure(verify_free_over_point_stabilizer(n, p)?, || {
                    format!("not free for n={n} p={p}")
                })?;
            }
        }
        let mut subgroups = 0;
        for p in [2u32, 3, 5] {
            for n in 2..=6usize {
                for e in maximal_elem_abelians(n - 1, p)? {
                    let e = e.embed(n)?;
                    let mats = lie_matrices(n, p, e.generators());
                    let s = sigma_rank(&mats, 1 << 12)?;
                    ensure(s.pf_dim == 0, || {
                        format!("Lie({n}) on {} has pf part {}", e.shape(), s.pf_dim)
                    })?;
                    let members = scan(&mats, p, 1, 1 << 20)?.into_iter().filter(|r| r.member).count();
                    ensure(members == 0, || {
                        format!("Lie({n}) on {}: {members} member points", e.shape())
                    })?;
                    subgroups += 1;
                }
            }
        }
        Ok(format!(
            "n ≤ 7 free of rank 1; {subgroups} subgroups of S_(n-1) projective, n ≤ 6"
        ))
    });
}

#[test]
fn c05_projective_case() {
    criterion(5, "projective case", Duration::from_secs(10), || {
        for n in ["5", "7"] {
            let v = json(&["complexity", "--n", n, "--p", "2"])?;
            ensure(v["value"] == 0 && v["certified"] == true, || format!("Lie({n}): {v}"))?;
        }
        Ok("c(Lie(5)) = c(Lie(7)) = 0 at p = 2, certified".into())
    });
}

#[test]
fn c06_lie4() {
    criterion(6, "c(Lie(4), p=2) = 2", Duration::from_secs(10), || {
        let e = regular_elem_abelian(2, 2)?;
        let mats = lie_matrices(4, 2, e.generators());
        let mut points = 0;
        for ext in [1, 2] {
            for r in scan(&mats, 2, ext, 1 << 20)? {
                ensure(r.member, || format!("{:?} over GF(2^{ext}) is not a member", r.alpha))?;
                points += 1;
            }
        }
        ensure(points == 3 + 5, || format!("{points} projective points"))?;
        for j in 0..2 {
            let c = generic_membership(&mats, j, &GenericConfig::default())?;
            ensure(c.outcome == GenericOutcome::Full, || {
                format!("chart {}: {:?}", j + 1, c.outcome)
            })?;
        }
        let cert = assemble(4, 2, &ComplexityOptions::default())?;
        ensure(cert.certified && cert.value == Some(2), || {
            format!("certificate {:?}", cert.range())
        })?;
        Ok(format!("{points} member points, both charts full, certified 2"))
    });
}

#[test]
fn c07_lie6() {
    criterion(7, "c(Lie(6)) = 1 at p = 2, 3", 10 * MINUTE, || {
        for p in [2u32, 3] {
            let cert = assemble(6, p, &ComplexityOptions::default())?;
            ensure(cert.certified && cert.value == Some(1), || {
                format!("p={p}: {:?}", cert.range())
            })?;
            for s in &cert.subgroups {
                if let Some(cap) = s.cap {
                    ensure(s.summary.upper <= cap, || {
                        format!("p={p} {}: upper above cap {cap}", s.shape)
                    })?;
                }
            }
        }
        Ok("certified 1 at p = 2 and p = 3, caps respected".into())
    });
}

#[test]
fn c08_p_power_consistency() {
    criterion(8, "p-power consistency", 10 * MINUTE, || {
        for p in [2u32, 3] {
            let cert = p_power_consistency(6, p, &ComplexityOptions::default())?;
            let c = cert.consistency.as_ref().ok_or("no consistency record")?;
            ensure(c.agree == Some(true), || {
                format!("p={p}: expected {:?}, found {:?}", c.expected, c.found)
            })?;
        }
        Ok("(6,2) and (6,3) agree with max_i c(Lie(p^i))".into())
    });
}

/// Re-tests every point at all of its scalar multiples.
fn check_cone(mats: &[DenseMatrix], points: &[PointRecord], p: u32) -> Result<usize, Box<dyn Error>> {
    let mut tested = 0;
    for r in points {
        let field = FieldContext::get(p, r.e)?;
        for lambda in 1..field.order() as u16 {
            let scaled: Vec<u16> = r.alpha.iter().map(|&x| field.mul(x, lambda)).collect();
            // test_point fails if the two freeness criteria disagree.
            let s = test_point(mats, &scaled, &field)?;
            ensure(s.member == r.member && s.rank == r.rank, || {
                format!("{:?} and {lambda}·α disagree", r.alpha)
            })?;
            tested += 1;
        }
    }
    Ok(tested)
}

#[test]
fn c09_cone_and_criteria() {
    criterion(9, "cone and criterion invariants", 2 * MINUTE, || {
        let opts = full_options();
        let mut tested = 0;
        for (n, p) in [(5usize, 2u32), (7, 2), (4, 2), (6, 2), (6, 3)] {
            for e in maximal_elem_abelians(n, p)? {
                let (_, analysis) = subgroup_analysis(n, p, &e, &opts)?;
                if let Some(a) = analysis {
                    let mats = lie_matrices(n, p, e.generators());
                    tested += check_cone(&mats, &a.points, p)?;
                }
            }
        }
        Ok(format!("{tested} scaled points agree"))
    });
}

#[test]
fn c10_lie8_stretch() {
    criterion(10, "c(Lie(8), p=2) = 3 (stretch)", 240 * MINUTE, || {
        let cert = assemble(8, 2, &ComplexityOptions::default())?;
        let conj = cert.conjecture.as_ref().ok_or("no record for the regular subgroup")?;
        ensure(conj.points_tested == 7 + 21 && conj.member_points == 28, || {
            format!("{} of {} points are members", conj.member_points, conj.points_tested)
        })?;
        ensure(conj.charts.iter().all(|c| c.outcome == GenericOutcome::Full), || {
            format!("charts {:?}", conj.charts.iter().map(|c| c.outcome).collect::<Vec<_>>())
        })?;
        ensure(conj.verdict == Verdict::CertifiedTrue, || {
            format!("verdict {:?}", conj.verdict)
        })?;
        ensure(cert.certified && cert.value == Some(3), || {
            format!("certificate {:?}", cert.range())
        })?;
        let methods: Vec<&str> = conj.charts.iter().map(|c| c.method.as_str()).collect();
        Ok(format!("28 member points, charts {methods:?}, certified 3"))
    });
}

#[test]
fn c11_determinism() {
    criterion(11, "determinism across thread counts", 2 * MINUTE, || {
        let runs: [&[&str]; 5] = [
            &["complexity", "--n", "5", "--p", "2"],
            &["complexity", "--n", "7", "--p", "2"],
            &["complexity", "--n", "4", "--p", "2"],
            &["consistency", "--n", "6", "--p", "2"],
            &["consistency", "--n", "6", "--p", "3"],
        ];
        for args in runs {
            let mut outputs = Vec::new();
            for threads in ["1", "8", "1", "8"] {
                let out = Command::new(env!("CARGO_BIN_EXE_liemod"))
                    .args(["--threads", threads])
                    .args(args)
                    .output()?;
                ensure(out.status.success(), || format!("{args:?} failed at {threads} threads"))?;
                outputs.push(out.stdout);
            }
            ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
                format!("{args:?} output differs")
            })?;
        }
        Ok("byte-identical JSON at 1 and 8 threads, two runs each".into())
    });
}
