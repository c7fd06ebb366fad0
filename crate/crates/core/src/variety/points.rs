use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Elem, FieldContext};

/// A nonzero `α ∈ GF(p^e)^k`, the parameter of `u_α = 1 + Σ α_i (g_i - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ShiftedUnitPoint {
    pub alpha: Vec<Elem>,
    pub e: u32,
}

impl ShiftedUnitPoint {
    pub fn new(alpha: Vec<Elem>, field: &FieldContext) -> Result<Self> {
        if alpha.iter().all(|&x| x == 0) {
            return Err(Error::invalid("alpha must be nonzero"));
        }
        if let Some(&x) = alpha.iter().find(|&&x| x as u32 >= field.order()) {
            return Err(Error::invalid(format!(
                "{x} is not an element of GF({})",
                field.order()
            )));
        }
        Ok(ShiftedUnitPoint {
            alpha,
            e: field.degree(),
        })
    }

    /// Whether the first nonzero coordinate is 1.
    pub fn is_normalized(&self) -> bool {
        self.alpha.iter().find(|&&x| x != 0) == Some(&1)
    }

    /// The representative of the same projective point with leading coordinate 1.
    pub fn normalized(&self, field: &FieldContext) -> Self {
        let lead = *self.alpha.iter().find(|&&x| x != 0).expect("nonzero");
        let inv = field.inv_nonzero(lead);
        ShiftedUnitPoint {
            alpha: self.alpha.iter().map(|&x| field.mul(x, inv)).collect(),
            e: self.e,
        }
    }
}

/// Number of points of `P^{k-1}(GF(q))`.
pub fn projective_point_count(k: usize, q: u32) -> u128 {
    if k == 0 {
        return 0;
    }
    ((q as u128).pow(k as u32) - 1) / (q as u128 - 1)
}

/// Normalized representatives of `P^{k-1}(GF(q))` in lexicographic order of
/// coordinate tuples.
pub fn projective_points(k: usize, field: &FieldContext, budget: u128) -> Result<Vec<ShiftedUnitPoint>> {
    let q = field.order();
    let count = projective_point_count(k, q);
    if count > budget {
        return Err(Error::Resource(format!(
            "{count} projective points over GF({q}) exceed the point budget {budget}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    // Leading position i from the right: (0,...,0,1,*,...,*) sorts first when
    // the leading 1 sits furthest right.
    for lead in (0..k).rev() {
        let free = k - lead - 1;
        let total = (q as u64).pow(free as u32);
        for idx in 0..total {
            let mut alpha = vec![0; k];
            alpha[lead] = 1;
            let mut x = idx;
            for slot in alpha[lead + 1..].iter_mut().rev() {
                *slot = (x % q as u64) as Elem;
                x /= q as u64;
            }
            out.push(ShiftedUnitPoint {
                alpha,
                e: field.degree(),
            });
        }
    }
    Ok(out)
}

/// All points of `GF(q)^s` in lexicographic order.
pub(crate) fn affine_points(s: usize, q: u32) -> impl Iterator<Item = Vec<Elem>> {
    let total = (q as u64).pow(s as u32);
    (0..total).map(move |idx| {
        let mut v = vec![0; s];
        let mut x = idx;
        for slot in v.iter_mut().rev() {
            *slot = (x % q as u64) as Elem;
            x /= q as u64;
        }
        v
    })
}
