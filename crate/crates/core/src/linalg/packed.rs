//! Characteristic-2 kernels. `BitMatrix` packs GF(2) rows into machine words;
//! `SlicedMatrix` stores GF(2^e) rows as `e` bit planes (plane `b` holds the
//! coefficient of `x^b`), so a row operation `r_i += c r_k` is a handful of
//! word XORs selected by the GF(2)-matrix of multiplication by `c`.

use std::sync::Arc;

use super::dense::DenseMatrix;
use super::gf::{Elem, FieldContext};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        if m.field().order() != 2 {
            return Err(Error::invalid("bit packing needs a matrix over GF(2)"));
        }
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
            for (j, &x) in m.row(i).iter().enumerate() {
                if x != 0 {
                    dst[j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self, field: Arc<FieldContext>) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    m.set(i, j, 1);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.stride + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn rank(&self) -> usize {
        let mut a = self.data.clone();
        let (rows, stride) = (self.rows, self.stride);
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (r..rows).find(|&i| a[i * stride + w] & bit != 0) else {
                continue;
            };
            if pr != r {
                for k in w..stride {
                    a.swap(pr * stride + k, r * stride + k);
                }
            }
            let (head, below) = a.split_at_mut((r + 1) * stride);
            let pivot = &head[r * stride + w..(r + 1) * stride];
            for row in below.chunks_exact_mut(stride) {
                if row[w] & bit != 0 {
                    for (d, s) in row[w..].iter_mut().zip(pivot) {
                        *d ^= s;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Reduces to row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let (rows, stride) = (self.rows, self.stride);
        let a = &mut self.data;
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            let r = pivots.len();
            if r == rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (r..rows).find(|&i| a[i * stride + w] & bit != 0) else {
                continue;
            };
            if pr != r {
                for k in w..stride {
                    a.swap(pr * stride + k, r * stride + k);
                }
            }
            let pivot: Vec<u64> = a[r * stride + w..(r + 1) * stride].to_vec();
            for i in (0..rows).filter(|&i| i != r) {
                let row = &mut a[i * stride..(i + 1) * stride];
                if row[w] & bit != 0 {
                    for (d, s) in row[w..].iter_mut().zip(&pivot) {
                        *d ^= s;
                    }
                }
            }
            pivots.push(c);
        }
        pivots
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("bit matrix product".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let s = other.stride;
        for i in 0..self.rows {
            let dst = &mut out.data[i * s..(i + 1) * s];
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (d, &x) in dst.iter_mut().zip(other.row_words(k)) {
                        *d ^= x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Largest extension degree the sliced layout handles.
pub const MAX_PLANES: u32 = 8;

/// GF(2^e) matrix in bit-sliced form.
#[derive(Clone, Debug)]
pub struct SlicedMatrix {
    field: Arc<FieldContext>,
    rows: usize,
    cols: usize,
    stride: usize,
    planes: usize,
    data: Vec<u64>,
}

impl SlicedMatrix {
    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        let field = m.field().clone();
        if field.characteristic() != 2 {
            return Err(Error::invalid("bit slicing needs characteristic 2"));
        }
        if field.degree() > MAX_PLANES {
            return Err(Error::invalid(format!(
                "bit slicing supports at most {MAX_PLANES} planes"
            )));
        }
        let planes = field.degree() as usize;
        let stride = m.cols().div_ceil(64);
        let mut data = vec![0u64; m.rows() * planes * stride];
        for i in 0..m.rows() {
            for (j, &x) in m.row(i).iter().enumerate() {
                for b in 0..planes {
                    if x >> b & 1 == 1 {
                        data[(i * planes + b) * stride + j / 64] |= 1 << (j % 64);
                    }
                }
            }
        }
        Ok(SlicedMatrix {
            field,
            rows: m.rows(),
            cols: m.cols(),
            stride,
            planes,
            data,
        })
    }

    fn row_len(&self) -> usize {
        self.planes * self.stride
    }

    #[inline]
    fn entry(row: &[u64], planes: usize, stride: usize, j: usize) -> Elem {
        let (w, s) = (j / 64, j % 64);
        (0..planes).fold(0, |acc, b| acc | (((row[b * stride + w] >> s) & 1) as Elem) << b)
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        let len = self.row_len();
        Self::entry(&self.data[i * len..(i + 1) * len], self.planes, self.stride, j)
    }

    /// `masks[j]` encodes `c * x^j`: bit `b` set means source plane `j` feeds
    /// plane `b` of `c * source`.
    fn mul_masks(&self, c: Elem) -> [u8; MAX_PLANES as usize] {
        let mut masks = [0u8; MAX_PLANES as usize];
        for (j, m) in masks.iter_mut().take(self.planes).enumerate() {
            *m = self.field.mul(c, 1 << j) as u8;
        }
        masks
    }

    pub fn rank(&self) -> usize {
        let f = self.field.clone();
        let (planes, stride, len) = (self.planes, self.stride, self.row_len());
        let mut a = self.data.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let w = c / 64;
            let Some(pr) = (r..self.rows).find(|&i| Self::entry(&a[i * len..(i + 1) * len], planes, stride, c) != 0)
            else {
                continue;
            };
            if pr != r {
                for k in 0..len {
                    a.swap(pr * len + k, r * len + k);
                }
            }
            let (head, below) = a.split_at_mut((r + 1) * len);
            let pivot = &head[r * len..];
            let inv = f.inv_nonzero(Self::entry(pivot, planes, stride, c));
            for row in below.chunks_exact_mut(len) {
                let x = Self::entry(row, planes, stride, c);
                if x == 0 {
                    continue;
                }
                let masks = self.mul_masks(f.mul(x, inv));
                for (src_plane, &mask) in masks[..planes].iter().enumerate() {
                    let src = &pivot[src_plane * stride + w..(src_plane + 1) * stride];
                    for dst_plane in 0..planes {
                        if mask >> dst_plane & 1 == 1 {
                            let dst = &mut row[dst_plane * stride + w..(dst_plane + 1) * stride];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d ^= s;
                            }
                        }
                    }
                }
            }
            r += 1;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitmatrix_round_trip_and_product() {
        let f2 = FieldContext::get(2, 1).unwrap();
        let a = DenseMatrix::from_rows(f2.clone(), &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let b = DenseMatrix::from_rows(f2.clone(), &[vec![1, 1], vec![0, 1], vec![1, 0]]).unwrap();
        let pa = BitMatrix::from_dense(&a).unwrap();
        assert_eq!(pa.to_dense(f2.clone()), a);
        let prod = pa.mul(&BitMatrix::from_dense(&b).unwrap()).unwrap();
        assert_eq!(prod.to_dense(f2), a.mul_generic(&b));
    }

    #[test]
    fn sliced_entries() {
        let f8 = FieldContext::get(2, 3).unwrap();
        let m = DenseMatrix::from_rows(f8, &[vec![0, 5, 7], vec![3, 1, 6]]).unwrap();
        let s = SlicedMatrix::from_dense(&m).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(s.get(i, j), m.get(i, j));
            }
        }
    }
}
