//! Incremental row-echelon span over a finite field.

use std::sync::Arc;

use super::gf::{Elem, FieldContext};
use crate::error::{Error, Result};

/// Echelon basis of a growing subspace of `GF(q)^len`. Each stored row is
/// scaled so its pivot entry is 1; rows are kept sorted by pivot column.
#[derive(Clone, Debug)]
pub struct EchelonSpan {
    field: Arc<FieldContext>,
    len: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl EchelonSpan {
    pub fn new(field: Arc<FieldContext>, len: usize) -> Self {
        EchelonSpan {
            field,
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.len
    }

    /// Reduces `v` against the current basis in place; returns the first
    /// nonzero column of the remainder.
    pub fn reduce(&self, v: &mut [Elem]) -> Option<usize> {
        let f = &self.field;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                f.axpy(&mut v[pc..], f.neg(c), &row[pc..]);
            }
        }
        v.iter().position(|&x| x != 0)
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool> {
        self.check_len(v)?;
        let mut w = v.to_vec();
        Ok(self.reduce(&mut w).is_none())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Elem]) -> Result<bool> {
        self.check_len(v)?;
        let mut w = v.to_vec();
        let Some(pc) = self.reduce(&mut w) else {
            return Ok(false);
        };
        let inv = self.field.inv_nonzero(w[pc]);
        self.field.scale(&mut w[pc..], inv);
        let at = self.pivots.partition_point(|&x| x < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, w);
        Ok(true)
    }

    fn check_len(&self, v: &[Elem]) -> Result<()> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a span of length {}",
                v.len(),
                self.len
            )));
        }
        Ok(())
    }
}
