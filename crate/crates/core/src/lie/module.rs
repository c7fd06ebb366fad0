use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::basis::LieBasis;
use super::cache;
use super::resources::ResourceLimits;
use crate::error::{Error, Result};
use crate::group_algebra::{dsw_element, Straightener};
use crate::linalg::{DenseMatrix, EchelonSpan, Elem, FieldContext};
use crate::perm::{factorial, long_cycle, ElemAbelianSubgroup, Permutation};

/// Largest degree for the regular-module oracles (`n!`-dimensional vectors).
pub const ORACLE_MAX_DEGREE: usize = 7;

static MATRICES_BUILT: AtomicU64 = AtomicU64::new(0);

/// Number of action matrices computed by this process so far.
pub fn action_matrices_built() -> u64 {
    MATRICES_BUILT.load(Ordering::Relaxed)
}

/// Matrix of `g` on `Lie(n)` in the basis `σ ω_n`; column `σ` holds the
/// coordinates of `g σ ω_n`.
pub fn action_matrix(g: &Permutation, p: u32, limits: ResourceLimits) -> Result<DenseMatrix> {
    let n = g.degree();
    limits.check(n, p)?;
    let basis = LieBasis::new(n)?;
    action_matrix_in(&basis, g, p)
}

fn action_matrix_in(basis: &LieBasis, g: &Permutation, p: u32) -> Result<DenseMatrix> {
    let n = basis.degree();
    if g.degree() != n {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: n,
        });
    }
    let field = FieldContext::get(p, 1)?;
    let st = Straightener::get(n, p)?;
    MATRICES_BUILT.fetch_add(1, Ordering::Relaxed);
    let dim = basis.len();
    let columns: Vec<Vec<(u32, Elem)>> = basis
        .elements()
        .par_iter()
        .map(|sigma| {
            let mut col = Vec::new();
            st.for_each_term(&g.compose_unchecked(sigma), |tau, c| {
                col.push((tau.lex_rank() as u32, c));
            });
            col
        })
        .collect();
    let mut m = DenseMatrix::zeros(field, dim, dim);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, c) in col {
            m.set(i as usize, j, c);
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Built,
    CacheHit,
}

/// Action matrices of a list of permutations on `Lie(n)` over `GF(p)`.
#[derive(Clone, Debug)]
pub struct LieRepresentation {
    n: usize,
    p: u32,
    generators: Vec<Permutation>,
    matrices: Vec<DenseMatrix>,
    provenance: Provenance,
}

impl LieRepresentation {
    pub fn build(n: usize, p: u32, generators: &[Permutation], limits: ResourceLimits) -> Result<Self> {
        limits.check(n, p)?;
        let basis = LieBasis::new(n)?;
        let matrices = generators
            .iter()
            .map(|g| action_matrix_in(&basis, g, p))
            .collect::<Result<_>>()?;
        Ok(LieRepresentation {
            n,
            p,
            generators: generators.to_vec(),
            matrices,
            provenance: Provenance::Built,
        })
    }

    /// Loads from `cache_dir` when a valid file exists, otherwise builds and
    /// stores. Invalid cache files are reported, never silently replaced.
    pub fn build_cached(
        n: usize,
        p: u32,
        generators: &[Permutation],
        limits: ResourceLimits,
        cache_dir: Option<&Path>,
    ) -> Result<Self> {
        let Some(dir) = cache_dir else {
            return Self::build(n, p, generators, limits);
        };
        limits.check(n, p)?;
        if let Some(rep) = cache::cache_load(dir, n, p, generators)? {
            return Ok(rep);
        }
        let rep = Self::build(n, p, generators, limits)?;
        cache::cache_store(&rep, dir)?;
        Ok(rep)
    }

    pub(crate) fn from_parts(
        n: usize,
        p: u32,
        generators: Vec<Permutation>,
        matrices: Vec<DenseMatrix>,
        provenance: Provenance,
    ) -> Self {
        LieRepresentation {
            n,
            p,
            generators,
            matrices,
            provenance,
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        factorial(self.n - 1).unwrap_or(0)
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn matrix_for(&self, g: &Permutation) -> Option<&DenseMatrix> {
        self.generators.iter().position(|h| h == g).map(|i| &self.matrices[i])
    }
}

/// One matrix per generator of `e`, in generator order. Generators missing
/// from `rep` are built on demand.
pub fn restrict(rep: &LieRepresentation, e: &ElemAbelianSubgroup) -> Result<Vec<DenseMatrix>> {
    if e.degree() != rep.n {
        return Err(Error::DegreeMismatch {
            left: e.degree(),
            right: rep.n,
        });
    }
    let mut basis = None;
    e.generators()
        .iter()
        .map(|g| match rep.matrix_for(g) {
            Some(m) => Ok(m.clone()),
            None => {
                if basis.is_none() {
                    basis = Some(LieBasis::new(rep.n)?);
                }
                action_matrix_in(basis.as_ref().expect("just built"), g, rep.p)
            }
        })
        .collect()
}

/// For each generator `g`, the permutation of regular-module coordinates
/// induced by left multiplication.
fn left_mul_maps(gens: &[Permutation], n: usize) -> Vec<Vec<u32>> {
    let total = factorial(n).expect("oracle degree");
    gens.iter()
        .map(|g| {
            (0..total)
                .map(|r| {
                    let h = Permutation::from_lex_rank(r, n).expect("rank in range");
                    g.compose_unchecked(&h).lex_rank() as u32
                })
                .collect()
        })
        .collect()
}

fn check_oracle_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > ORACLE_MAX_DEGREE {
        return Err(Error::Resource(format!(
            "regular-module oracle limited to n <= {ORACLE_MAX_DEGREE} (S_{n} has {} elements)",
            factorial(n).map_or("too many".into(), |x| x.to_string())
        )));
    }
    Ok(())
}

/// Dimension of `span{σ ω_n : σ ∈ S_n}` inside the regular module, computed
/// by closing `span{ω_n}` under left multiplication by `(1,2)` and `(1,...,n)`.
pub fn regular_span_rank(n: usize, p: u32) -> Result<usize> {
    check_oracle_degree(n)?;
    let field = FieldContext::get(p, 1)?;
    let omega = dsw_element(n, p)?.to_regular_vector()?;
    let mut gens = vec![long_cycle(n)];
    if n > 2 {
        gens.push(Permutation::parse_cycles("(1,2)", n)?);
    }
    let maps = left_mul_maps(&gens, n);
    let mut span = EchelonSpan::new(field, omega.len());
    let mut queue = Vec::new();
    if span.insert(&omega)? {
        queue.push(omega);
    }
    let mut next = 0;
    while next < queue.len() {
        let v = queue[next].clone();
        next += 1;
        for map in &maps {
            let mut w = vec![0; v.len()];
            for (i, &x) in v.iter().enumerate() {
                w[map[i] as usize] = x;
            }
            if span.insert(&w)? {
                queue.push(w);
            }
        }
    }
    Ok(span.dim())
}

/// Whether the regular-module span of `Lie(n)` has dimension `(n-1)!`.
pub fn verify_dimension(n: usize, p: u32) -> Result<bool> {
    Ok(regular_span_rank(n, p)? == factorial(n - 1).expect("small n"))
}

/// Whether `{y (1,n) ω_n : y ∈ S_{n-1}}` is linearly independent in the
/// regular module, i.e. `Lie(n)` is free of rank 1 over `S_{n-1}`.
pub fn verify_free_over_point_stabilizer(n: usize, p: u32) -> Result<bool> {
    check_oracle_degree(n)?;
    if n == 1 {
        return Ok(true);
    }
    let field = FieldContext::get(p, 1)?;
    let omega = dsw_element(n, p)?;
    let swap = Permutation::from_cycles(n, &[&[1, n]])?;
    let base = omega.left_mul_perm(&swap)?;
    let count = factorial(n - 1).expect("small n");
    let mut span = EchelonSpan::new(field, factorial(n).expect("small n"));
    for r in 0..count {
        let y = Permutation::from_lex_rank(r, n - 1)?.extend(n)?;
        if !span.insert(&base.left_mul_perm(&y)?.to_regular_vector()?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::regular_elem_abelian;

    #[test]
    fn identity_and_involution() {
        let l = ResourceLimits::default();
        let id = action_matrix(&Permutation::identity(4), 2, l).unwrap();
        assert_eq!(id, DenseMatrix::identity(FieldContext::get(2, 1).unwrap(), 6));
        let g = Permutation::parse_cycles("(1,2)(3,4)", 4).unwrap();
        let m = action_matrix(&g, 2, l).unwrap();
        assert_eq!(m.mul(&m).unwrap(), id);
    }

    #[test]
    fn lie2_is_sign_like() {
        let g = Permutation::parse_cycles("(1,2)", 2).unwrap();
        let m = action_matrix(&g, 3, ResourceLimits::default()).unwrap();
        assert_eq!(m.data(), &[2]);
        let m = action_matrix(&g, 2, ResourceLimits::default()).unwrap();
        assert_eq!(m.data(), &[1]);
    }

    #[test]
    fn oracles_small() {
        assert_eq!(regular_span_rank(4, 2).unwrap(), 6);
        assert!(verify_dimension(2, 5).unwrap());
        assert!(verify_dimension(1, 2).unwrap());
        assert!(verify_free_over_point_stabilizer(4, 2).unwrap());
        assert!(verify_free_over_point_stabilizer(3, 3).unwrap());
        assert!(verify_free_over_point_stabilizer(2, 2).unwrap());
        assert!(matches!(verify_dimension(8, 2), Err(Error::Resource(_))));
    }

    #[test]
    fn restriction_follows_generator_order() {
        let e = regular_elem_abelian(2, 2).unwrap();
        let rep = LieRepresentation::build(4, 2, &e.generators()[..1], ResourceLimits::default()).unwrap();
        let ms = restrict(&rep, &e).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(&ms[0], &rep.matrices()[0]);
        assert_eq!(ms[0].mul(&ms[1]).unwrap(), ms[1].mul(&ms[0]).unwrap());
    }
}
