use liemod::complexity::{
    assemble, combine, conjecture_check, p_power_consistency, subgroup_complexity, valuation_bound, ComplexityOptions,
    Verdict,
};
use liemod::lie::ResourceLimits;
use liemod::perm::maximal_elem_abelians;
use liemod::Error;

fn opts() -> ComplexityOptions {
    ComplexityOptions::default()
}

#[test]
fn headline_values() {
    for (n, p, want) in [
        (1usize, 2u32, 0usize),
        (2, 2, 1),
        (3, 2, 0),
        (4, 2, 2),
        (5, 2, 0),
        (6, 2, 1),
        (7, 2, 0),
        (3, 3, 1),
        (6, 3, 1),
        (5, 5, 1),
        (7, 7, 1),
    ] {
        let c = assemble(n, p, &opts()).unwrap();
        assert!(c.certified, "Lie({n}) at p = {p}: {:?}", c.range());
        assert_eq!(c.value, Some(want), "Lie({n}) at p = {p}");
        assert!(c.value.unwrap() <= c.bound_from_theorem as usize);
        assert_eq!(c.bound_from_theorem, valuation_bound(n, p).unwrap());
    }
}

#[test]
fn prime_degree_reaches_the_bound() {
    for p in [2u32, 3, 5, 7] {
        let r = conjecture_check(1, p, &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedTrue, "p = {p}");
        assert_eq!(r.dimension.value, Some(1));
    }
    assert_eq!(conjecture_check(0, 3, &opts()).unwrap().verdict, Verdict::CertifiedTrue);
}

#[test]
fn lie4_conjecture_record() {
    let c = assemble(4, 2, &opts()).unwrap();
    let r = c.conjecture.expect("4 = 2^2");
    assert_eq!(r.verdict, Verdict::CertifiedTrue);
    assert_eq!((r.points_tested, r.member_points), (8, 8));
    assert_eq!(r.charts.len(), 2);
}

#[test]
fn subgroup_summaries_respect_caps() {
    for (n, p) in [(6usize, 2u32), (6, 3), (4, 2)] {
        let entries: Vec<_> = maximal_elem_abelians(n, p)
            .unwrap()
            .iter()
            .map(|e| subgroup_complexity(n, p, e, &opts()).unwrap())
            .collect();
        for s in &entries {
            assert!(s.summary.lower <= s.summary.upper);
            assert!(s.summary.upper <= s.rank);
            if let Some(cap) = s.cap {
                assert!(s.summary.upper <= cap, "{n} {p} {}", s.shape);
            }
            assert_eq!(s.matrices_built, s.rank);
        }
        let c = combine(n, p, entries).unwrap();
        assert_eq!(c.value, assemble(n, p, &opts()).unwrap().value);
    }
}

#[test]
fn consistency_with_prime_powers() {
    for p in [2u32, 3] {
        let c = p_power_consistency(6, p, &opts()).unwrap();
        let rec = c.consistency.unwrap();
        assert_eq!(rec.agree, Some(true));
        assert_eq!(rec.expected, [1, 1]);
        assert_eq!(rec.found, [1, 1]);
        assert_eq!(rec.powers.len(), 1);
    }
    assert!(matches!(
        p_power_consistency(4, 2, &opts()),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        p_power_consistency(5, 2, &opts()),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(p_power_consistency(12, 2, &opts()), Err(Error::Resource(_))));
}

#[test]
fn resource_refusals() {
    let err = assemble(9, 3, &opts()).unwrap_err();
    assert!(matches!(err, Error::Resource(_)));
    assert!(err.to_string().contains("40320"), "{err}");
    let forced = ComplexityOptions {
        limits: ResourceLimits::forced(),
        ..opts()
    };
    assert!(matches!(assemble(10, 2, &forced), Err(Error::Resource(_))));
    // Degrees prime to p never build matrices, so no cap applies.
    assert_eq!(assemble(11, 3, &opts()).unwrap().value, Some(0));
}

#[test]
fn certificates_serialize_with_schema_first() {
    let c = assemble(6, 3, &opts()).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    assert!(text.starts_with("{\"schema\":1,"), "{text}");
    assert_eq!(text, serde_json::to_string(&assemble(6, 3, &opts()).unwrap()).unwrap());
}
