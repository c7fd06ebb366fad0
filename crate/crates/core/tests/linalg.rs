use std::sync::Arc;

use liemod::linalg::{BitMatrix, DenseMatrix, FieldContext, PolyMatrix, SlicedMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 7] = [(2, 1), (2, 2), (2, 8), (3, 1), (3, 2), (5, 1), (7, 2)];

fn random_matrix(f: &Arc<FieldContext>, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let q = f.order();
    let data = (0..rows * cols).map(|_| rng.random_range(0..q) as u16).collect();
    DenseMatrix::from_vec(f.clone(), rows, cols, data).unwrap()
}

/// Product of random `rows x r` and `r x cols` factors: rank at most `r`.
fn low_rank(f: &Arc<FieldContext>, rows: usize, cols: usize, r: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    random_matrix(f, rows, r, rng)
        .mul(&random_matrix(f, r, cols, rng))
        .unwrap()
}

fn case() -> impl Strategy<Value = (usize, usize, usize, usize, u64)> {
    (0..FIELDS.len(), 1usize..14, 1usize..14, 0usize..14, any::<u64>())
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant((fi, r, c, k, seed) in case()) {
        let (p, e) = FIELDS[fi];
        let f = FieldContext::get(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = low_rank(&f, r, c, k, &mut rng);
        let rank = a.rank();
        prop_assert!(rank <= k.min(r).min(c));
        prop_assert_eq!(rank, a.transpose().rank());
        prop_assert_eq!(rank, a.rank_generic());
        let (_, pivots) = a.rref();
        prop_assert_eq!(pivots.len(), rank);
        let (rows, cols) = a.rank_profile();
        prop_assert_eq!(a.submatrix(&rows, &cols).rank(), rank);
    }

    #[test]
    fn product_rank_is_bounded((fi, r, c, k, seed) in case()) {
        let (p, e) = FIELDS[fi];
        let f = FieldContext::get(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&f, r, k.max(1), &mut rng);
        let b = random_matrix(&f, k.max(1), c, &mut rng);
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn pencil_generic_rank_dominates_points(n in 1usize..6, seed in any::<u64>(), x in 0u16..9, y in 0u16..9) {
        let f3 = FieldContext::get(3, 1).unwrap();
        let f9 = FieldContext::get(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = low_rank(&f3, n, n, n / 2, &mut rng);
        let m0 = low_rank(&f3, n, n, 1, &mut rng);
        let m1 = low_rank(&f3, n, n, 2, &mut rng);
        let pencil = PolyMatrix::pencil(&base, 2, &[(0, &m0), (1, &m1)]).unwrap();
        let generic = pencil.generic_rank().unwrap();
        prop_assert!(pencil.evaluate(&[x, y], &f9).unwrap().rank() <= generic);
    }
}

#[test]
fn one_variable_pencils_attain_generic_rank_over_gf9() {
    // Minors of an n x n linear pencil have degree at most n < 9, so some
    // point of GF(9) avoids all their roots.
    let f3 = FieldContext::get(3, 1).unwrap();
    let f9 = FieldContext::get(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..60 {
        let n = 1 + trial % 7;
        let base = low_rank(&f3, n, n, trial % (n + 1), &mut rng);
        let slope = low_rank(&f3, n, n, (trial / 3) % (n + 1), &mut rng);
        let pencil = PolyMatrix::pencil(&base, 1, &[(0, &slope)]).unwrap();
        let best = (0..9)
            .map(|t| pencil.evaluate(&[t], &f9).unwrap().rank())
            .max()
            .unwrap();
        assert_eq!(best, pencil.generic_rank().unwrap(), "trial {trial}");
    }
}

#[test]
fn packed_and_sliced_match_generic_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for e in [1u32, 2, 4, 8] {
        let f = FieldContext::get(2, e).unwrap();
        for (size, r) in [(1, 1), (63, 40), (64, 64), (65, 17), (200, 150), (512, 300)] {
            let a = low_rank(&f, size, size, r, &mut rng);
            let want = a.rank_generic();
            assert!(want <= r);
            if e == 1 {
                assert_eq!(BitMatrix::from_dense(&a).unwrap().rank(), want, "GF(2) size {size}");
            } else {
                assert_eq!(
                    SlicedMatrix::from_dense(&a).unwrap().rank(),
                    want,
                    "GF(2^{e}) size {size}"
                );
            }
            assert_eq!(a.rank(), want);
        }
    }
}

#[test]
fn sliced_layout_refuses_wide_fields() {
    let f = FieldContext::get(2, 9).unwrap();
    let a = DenseMatrix::identity(f, 3);
    assert!(SlicedMatrix::from_dense(&a).is_err());
    assert_eq!(a.rank(), 3);
}

/// Textbook elimination on integers mod 3.
fn naive_rank_mod3(m: &DenseMatrix) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<i64>> = (0..rows)
        .map(|i| m.row(i).iter().map(|&x| x as i64).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] % 3 != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = if a[rank][c] == 1 { 1 } else { 2 };
        for x in a[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for i in 0..rows {
            if i != rank && a[i][c] != 0 {
                let factor = a[i][c];
                let pivot = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x = (*x - factor * y).rem_euclid(3);
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn large_ternary_rank_matches_naive_oracle() {
    let f = FieldContext::get(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for r in [200, 137, 0] {
        let a = if r == 200 {
            random_matrix(&f, 200, 200, &mut rng)
        } else {
            low_rank(&f, 200, 200, r, &mut rng)
        };
        assert_eq!(a.rank(), naive_rank_mod3(&a), "target rank {r}");
    }
}
