//! Tensor trains and the exact / approximate algebra shared by every other
//! module.
//!
//! A tensor train with `d` cores represents
//!
//! ```text
//! T[i_1, ..., i_d] = G_1[i_1] G_2[i_2] ... G_d[i_d]
//! ```
//!
//! where `G_k[i_k]` is an `r_{k-1} x r_k` matrix and `r_0 = r_d = 1`.
//! Dense layouts produced by this module are row-major in the multi-index,
//! so the first core carries the most significant digit.

mod core;
mod io;
mod matrix;
mod round;

pub use self::core::Core;
pub use self::io::{read_tt, read_ttm, write_tt, write_ttm};
pub use self::matrix::{MatCore, TtMatrix};
pub(crate) use self::round::sorted_svd;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A tensor train: a chain of order-3 cores with matching bond ranks and
/// unit boundary ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorTrain {
    cores: Vec<Core>,
}

impl TensorTrain {
    /// Validates the rank chain and wraps the cores.
    pub fn new(cores: Vec<Core>) -> Result<Self> {
        validate_chain(cores.iter().map(|c| (c.left(), c.right())))?;
        Ok(Self { cores })
    }

    /// Rank-1 train of all ones.
    pub fn ones(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().map(|&n| Core::from_fn(1, n, 1, |_, _, _| 1.0)).collect())
    }

    /// Rank-1 train of all zeros.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().map(|&n| Core::zeros(1, n, 1)).collect())
    }

    /// Rank-1 separable train `u_1 ⊗ u_2 ⊗ ... ⊗ u_d`.
    pub fn from_factors(factors: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            factors
                .iter()
                .map(|u| Core::new(1, u.len(), 1, u.clone()))
                .collect::<Result<_>>()?,
        )
    }

    /// Canonical basis vector selecting the entry at `idx`.
    pub fn basis(dims: &[usize], idx: &[usize]) -> Result<Self> {
        check_index(dims, idx)?;
        Self::new(
            dims.iter()
                .zip(idx)
                .map(|(&n, &i)| Core::from_fn(1, n, 1, |_, j, _| if j == i { 1.0 } else { 0.0 }))
                .collect(),
        )
    }

    /// Train with standard-normal core entries. `ranks` lists the `d - 1`
    /// interior bond ranks.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], ranks: &[usize], rng: &mut R) -> Result<Self> {
        if dims.is_empty() || ranks.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!(
                "{} cores need {} interior ranks, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                ranks.len()
            )));
        }
        let mut cores = Vec::with_capacity(dims.len());
        for (k, &n) in dims.iter().enumerate() {
            let left = if k == 0 { 1 } else { ranks[k - 1] };
            let right = if k + 1 == dims.len() { 1 } else { ranks[k] };
            cores.push(Core::from_fn(left, n, right, |_, _, _| rng.sample(StandardNormal)));
        }
        Self::new(cores)
    }

    /// TT-SVD of a dense row-major tensor with relative Frobenius accuracy
    /// `eps`.
    pub fn from_dense(dims: &[usize], data: &[f64], eps: f64) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != data.len() {
            return Err(Error::Dimension(format!(
                "dense tensor of {} entries does not match dims {dims:?}",
                data.len()
            )));
        }
        // A single core holding everything, then round splits it apart.
        let mut cores = Vec::with_capacity(dims.len());
        let mut rest = data.to_vec();
        let mut left = 1usize;
        for (k, &n) in dims.iter().enumerate() {
            if k + 1 == dims.len() {
                cores.push(Core::new(left, n, 1, rest)?);
                break;
            }
            let rows = left * n;
            let cols = rest.len() / rows;
            let m = nalgebra::DMatrix::from_row_slice(rows, cols, &rest);
            let qr = m.qr();
            let q = qr.q();
            let r = qr.r();
            let rank = q.ncols();
            cores.push(Core::from_left_unfolding(&q, n));
            rest = core::row_major(&r);
            left = rank;
        }
        let tt = Self { cores };
        Ok(tt.round(eps))
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    pub fn num_cores(&self) -> usize {
        self.cores.len()
    }

    /// Physical dimension of every core.
    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(Core::size).collect()
    }

    /// The `d - 1` interior bond ranks.
    pub fn bond_ranks(&self) -> Vec<usize> {
        self.cores.iter().skip(1).map(Core::left).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.bond_ranks().into_iter().max().unwrap_or(1)
    }

    /// Number of stored floating point values.
    pub fn storage(&self) -> usize {
        self.cores.iter().map(|c| c.data().len()).sum()
    }

    /// Number of entries of the represented tensor (may overflow `f64`
    /// precision for huge grids, hence the float).
    pub fn num_entries(&self) -> f64 {
        self.cores.iter().map(|c| c.size() as f64).product()
    }

    /// Entry at multi-index `idx`.
    pub fn eval(&self, idx: &[usize]) -> Result<f64> {
        check_index(&self.dims(), idx)?;
        Ok(self.eval_unchecked(idx))
    }

    pub(crate) fn eval_unchecked(&self, idx: &[usize]) -> f64 {
        let mut v = vec![1.0];
        let mut next = Vec::new();
        for (core, &i) in self.cores.iter().zip(idx) {
            core.left_contract(&v, i, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        v[0]
    }

    /// Entrywise sum. Interior ranks add.
    pub fn add(&self, other: &TensorTrain) -> Result<TensorTrain> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension(format!(
                "cannot add trains with dims {:?} and {:?}",
                self.dims(),
                other.dims()
            )));
        }
        let d = self.cores.len();
        if d == 1 {
            let a = &self.cores[0];
            let b = &other.cores[0];
            let data = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
            return TensorTrain::new(vec![Core::new(1, a.size(), 1, data)?]);
        }
        let mut cores = Vec::with_capacity(d);
        for (k, (a, b)) in self.cores.iter().zip(&other.cores).enumerate() {
            let n = a.size();
            let core = if k == 0 {
                Core::from_fn(1, n, a.right() + b.right(), |_, i, col| {
                    if col < a.right() {
                        a.get(0, i, col)
                    } else {
                        b.get(0, i, col - a.right())
                    }
                })
            } else if k + 1 == d {
                Core::from_fn(a.left() + b.left(), n, 1, |row, i, _| {
                    if row < a.left() {
                        a.get(row, i, 0)
                    } else {
                        b.get(row - a.left(), i, 0)
                    }
                })
            } else {
                Core::from_fn(a.left() + b.left(), n, a.right() + b.right(), |row, i, col| {
                    match (row < a.left(), col < a.right()) {
                        (true, true) => a.get(row, i, col),
                        (false, false) => b.get(row - a.left(), i, col - a.right()),
                        _ => 0.0,
                    }
                })
            };
            cores.push(core);
        }
        TensorTrain::new(cores)
    }

    /// Entrywise multiplication by `w`; ranks unchanged.
    pub fn scale(&self, w: f64) -> TensorTrain {
        let mut out = self.clone();
        out.cores[0].scale_in_place(w);
        out
    }

    /// Full inner product `sum_idx a[idx] * b[idx]`.
    pub fn dot(&self, other: &TensorTrain) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension(format!(
                "cannot dot trains with dims {:?} and {:?}",
                self.dims(),
                other.dims()
            )));
        }
        // m[a * rb + a'] is the running contraction over the bonds.
        let mut m = vec![1.0];
        let mut tmp = Vec::new();
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let (la, n, ra) = a.shape();
            let (lb, _, rb) = b.shape();
            // tmp[(a', i, beta)] = sum_alpha m[alpha, a'] * A[alpha, i, beta]
            tmp.clear();
            tmp.resize(lb * n * ra, 0.0);
            for alpha in 0..la {
                for ap in 0..lb {
                    let w = m[alpha * lb + ap];
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        let src = &a.data()[(alpha * n + i) * ra..(alpha * n + i + 1) * ra];
                        let dst = &mut tmp[(ap * n + i) * ra..(ap * n + i + 1) * ra];
                        for (d, &s) in dst.iter_mut().zip(src) {
                            *d += w * s;
                        }
                    }
                }
            }
            let mut next = vec![0.0; ra * rb];
            for ap in 0..lb {
                for i in 0..n {
                    let t = &tmp[(ap * n + i) * ra..(ap * n + i + 1) * ra];
                    let bb = &b.data()[(ap * n + i) * rb..(ap * n + i + 1) * rb];
                    for (beta, &tv) in t.iter().enumerate() {
                        if tv == 0.0 {
                            continue;
                        }
                        let row = &mut next[beta * rb..(beta + 1) * rb];
                        for (r, &bv) in row.iter_mut().zip(bb) {
                            *r += tv * bv;
                        }
                    }
                }
            }
            m = next;
        }
        Ok(m[0])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        // `self` always matches itself.
        self.dot(self).unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Tensor (Kronecker) product: the cores of `self` followed by those of
    /// `other`. The result's leading indices belong to `self`.
    pub fn kron(&self, other: &TensorTrain) -> TensorTrain {
        let mut cores = self.cores.clone();
        cores.extend(other.cores.iter().cloned());
        TensorTrain { cores }
    }

    /// Dense row-major contraction. Only sensible for small trains.
    pub fn to_dense(&self) -> Vec<f64> {
        // rows: accumulated multi-index prefix, cols: current bond.
        let mut acc = vec![1.0];
        let mut rank = 1usize;
        for core in &self.cores {
            let (l, n, r) = core.shape();
            debug_assert_eq!(l, rank);
            let prefixes = acc.len() / rank;
            let mut next = vec![0.0; prefixes * n * r];
            for p in 0..prefixes {
                for a in 0..l {
                    let w = acc[p * l + a];
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        let src = &core.data()[(a * n + i) * r..(a * n + i + 1) * r];
                        let dst = &mut next[(p * n + i) * r..(p * n + i + 1) * r];
                        for (d, &s) in dst.iter_mut().zip(src) {
                            *d += w * s;
                        }
                    }
                }
            }
            acc = next;
            rank = r;
        }
        acc
    }
}

pub(crate) fn validate_chain(shapes: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    let mut prev_right = None;
    let mut count = 0;
    let mut last_right = 1;
    for (k, (left, right)) in shapes.enumerate() {
        match prev_right {
            None if left != 1 => {
                return Err(Error::Dimension(format!("first core has left rank {left}, expected 1")))
            }
            Some(r) if r != left => {
                return Err(Error::Dimension(format!(
                    "core {k} has left rank {left} but core {} has right rank {r}",
                    k - 1
                )))
            }
            _ => {}
        }
        prev_right = Some(right);
        last_right = right;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Dimension("a tensor train needs at least one core".into()));
    }
    if last_right != 1 {
        return Err(Error::Dimension(format!(
            "last core has right rank {last_right}, expected 1"
        )));
    }
    Ok(())
}

pub(crate) fn check_index(dims: &[usize], idx: &[usize]) -> Result<()> {
    if idx.len() != dims.len() || idx.iter().zip(dims).any(|(&i, &n)| i >= n) {
        return Err(Error::OutOfBounds {
            index: idx.to_vec(),
            shape: dims.to_vec(),
        });
    }
    Ok(())
}
