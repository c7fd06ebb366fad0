use std::collections::BTreeMap;

use liemod::lie::{LieRepresentation, ResourceLimits};
use liemod::linalg::{DenseMatrix, FieldContext};
use liemod::perm::Permutation;
use liemod::variety::{
    analyze, chart_memberships, generic_membership, projective_free_part, scan, scan_reduced, sigma_rank,
    subset_grid_membership, test_point, GenericConfig, GenericOutcome, Mode, VarietyConfig,
};
use proptest::prelude::*;

fn matrices(n: usize, p: u32, gens: &[&str]) -> Vec<DenseMatrix> {
    let gens: Vec<Permutation> = gens.iter().map(|s| Permutation::parse_cycles(s, n).unwrap()).collect();
    LieRepresentation::build(n, p, &gens, ResourceLimits::default())
        .unwrap()
        .matrices()
        .to_vec()
}

/// `(alpha, rank, member)` per point of `P^{k-1}(GF(p))`, keyed by alpha.
fn golden(rows: &[(&[u16], usize, bool)]) -> BTreeMap<Vec<u16>, (usize, bool)> {
    rows.iter().map(|(a, r, m)| (a.to_vec(), (*r, *m))).collect()
}

fn check(n: usize, p: u32, gens: &[&str], sigma: (usize, usize), want: BTreeMap<Vec<u16>, (usize, bool)>) {
    let ms = matrices(n, p, gens);
    let s = sigma_rank(&ms, 512).unwrap();
    assert_eq!((s.free_count, s.pf_dim), sigma, "sigma for Lie({n}) at p={p}");
    let got: BTreeMap<Vec<u16>, (usize, bool)> = scan(&ms, p, 1, 1 << 20)
        .unwrap()
        .into_iter()
        .map(|r| (r.alpha, (r.rank, r.member)))
        .collect();
    assert_eq!(got, want, "points for Lie({n}) at p={p}");
}

#[test]
fn lie4_regular_e2() {
    check(
        4,
        2,
        &["(1,2)(3,4)", "(1,3)(2,4)"],
        (0, 6),
        golden(&[(&[0, 1], 2, true), (&[1, 0], 2, true), (&[1, 1], 2, true)]),
    );
}

#[test]
fn lie4_two_transpositions() {
    check(
        4,
        2,
        &["(1,2)", "(3,4)"],
        (1, 2),
        golden(&[(&[0, 1], 3, false), (&[1, 0], 3, false), (&[1, 1], 2, true)]),
    );
}

#[test]
fn lie3_three_cycle() {
    check(3, 3, &["(1,2,3)"], (0, 2), golden(&[(&[1], 0, true)]));
}

#[test]
fn lie6_shape_2_1() {
    check(
        6,
        2,
        &["(1,2)(3,4)", "(1,3)(2,4)", "(5,6)"],
        (12, 24),
        golden(&[
            (&[0, 0, 1], 60, false),
            (&[0, 1, 0], 60, false),
            (&[0, 1, 1], 56, true),
            (&[1, 0, 0], 60, false),
            (&[1, 0, 1], 56, true),
            (&[1, 1, 0], 60, false),
            (&[1, 1, 1], 58, true),
        ]),
    );
}

#[test]
fn lie6_shape_1_1_1() {
    let mut rows: Vec<(&[u16], usize, bool)> = vec![
        (&[0, 0, 1], 60, false),
        (&[0, 1, 0], 60, false),
        (&[0, 1, 1], 60, false),
        (&[1, 0, 0], 60, false),
        (&[1, 0, 1], 60, false),
        (&[1, 1, 0], 60, false),
    ];
    rows.push((&[1, 1, 1], 58, true));
    check(6, 2, &["(1,2)", "(3,4)", "(5,6)"], (14, 8), golden(&rows));
}

#[test]
fn lie6_two_three_cycles() {
    check(
        6,
        3,
        &["(1,2,3)", "(4,5,6)"],
        (12, 12),
        golden(&[
            (&[0, 1], 40, false),
            (&[1, 0], 40, false),
            (&[1, 1], 39, true),
            (&[1, 2], 38, true),
        ]),
    );
}

#[test]
fn lie4_regular_e2_is_everywhere_singular() {
    let ms = matrices(4, 2, &["(1,2)(3,4)", "(1,3)(2,4)"]);
    let a = analyze(&ms, &VarietyConfig::default()).unwrap();
    assert!(a.generic.iter().all(|c| c.outcome == GenericOutcome::Full));
    assert_eq!(a.dimension.value, Some(2));
    assert!(a.dimension.certified);
}

#[test]
fn point_mode_matches_scan() {
    let ms = matrices(6, 3, &["(1,2,3)", "(4,5,6)"]);
    let cfg = VarietyConfig {
        mode: Mode::Point,
        alpha: Some((vec![1, 2], 1)),
        ..VarietyConfig::default()
    };
    let a = analyze(&ms, &cfg).unwrap();
    assert_eq!(a.points.len(), 1);
    assert_eq!((a.points[0].rank, a.points[0].member), (38, true));
}

/// Config under which only the interpolation grid can decide a chart.
fn grid_only() -> GenericConfig {
    GenericConfig {
        witness_max_e: 0,
        degree_cap: 1,
        work_budget: 1,
        ..GenericConfig::default()
    }
}

#[test]
fn grid_decides_and_implies_the_other_charts() {
    let ms = matrices(4, 2, &["(1,2)(3,4)", "(1,3)(2,4)"]);
    let first = generic_membership(&ms, 0, &grid_only()).unwrap();
    assert_eq!(first.outcome, GenericOutcome::Aborted);
    let grid = subset_grid_membership(&ms, 0, &grid_only()).unwrap();
    assert_eq!(
        (grid.outcome, grid.method.as_str()),
        (GenericOutcome::Full, "subset-grid")
    );
    let charts = chart_memberships(&ms, &grid_only()).unwrap();
    let methods: Vec<&str> = charts.iter().map(|c| c.method.as_str()).collect();
    assert_eq!(methods, ["subset-grid", "implied"]);
    assert!(charts.iter().all(|c| c.outcome == GenericOutcome::Full));
}

#[test]
fn grid_finds_free_points() {
    let ms = matrices(6, 3, &["(1,2,3)", "(4,5,6)"]);
    let pf = projective_free_part(&ms, 512).unwrap();
    let c = subset_grid_membership(&pf.matrices, 0, &grid_only()).unwrap();
    assert_eq!(c.outcome, GenericOutcome::Proper);
    let w = c.witness.unwrap();
    let f = FieldContext::get(3, w.e).unwrap();
    assert!(!test_point(&pf.matrices, &w.alpha, &f).unwrap().member);
    let tight = GenericConfig {
        grid_point_budget: 2,
        ..grid_only()
    };
    assert_eq!(
        subset_grid_membership(&pf.matrices, 0, &tight).unwrap().outcome,
        GenericOutcome::Aborted
    );
}

#[test]
fn reduced_scan_matches_the_full_module() {
    let ms = matrices(6, 2, &["(1,2)(3,4)", "(1,3)(2,4)", "(5,6)"]);
    let pf = projective_free_part(&ms, 512).unwrap();
    for e in [1, 2] {
        let direct = scan(&ms, 2, e, 1 << 20).unwrap();
        assert_eq!(scan_reduced(&ms, &pf, e, 1 << 20).unwrap(), direct);
    }
    assert!(scan(&ms, 2, 5, 1 << 20).is_err());
}

proptest! {
    #[test]
    fn membership_is_scale_invariant(a in 0u16..9, b in 0u16..9, lambda in 1u16..9) {
        prop_assume!(a != 0 || b != 0);
        let ms = matrices(6, 3, &["(1,2,3)", "(4,5,6)"]);
        let f = FieldContext::get(3, 2).unwrap();
        let r = test_point(&ms, &[a, b], &f).unwrap();
        let s = test_point(&ms, &[f.mul(a, lambda), f.mul(b, lambda)], &f).unwrap();
        prop_assert_eq!((r.member, r.rank), (s.member, s.rank));
    }
}
