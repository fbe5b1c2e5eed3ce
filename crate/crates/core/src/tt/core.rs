use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One order-3 core of a tensor train, shape `(left, size, right)`, stored
/// row-major so that element `(a, i, b)` sits at `(a * size + i) * right + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Core {
    left: usize,
    size: usize,
    right: usize,
    data: Vec<f64>,
}

impl Core {
    pub fn new(left: usize, size: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || size == 0 || right == 0 {
            return Err(Error::Dimension(format!(
                "core shape ({left}, {size}, {right}) has a zero extent"
            )));
        }
        if data.len() != left * size * right {
            return Err(Error::Dimension(format!(
                "core shape ({left}, {size}, {right}) needs {} values, got {}",
                left * size * right,
                data.len()
            )));
        }
        Ok(Self {
            left,
            size,
            right,
            data,
        })
    }

    pub fn zeros(left: usize, size: usize, right: usize) -> Self {
        Self {
            left,
            size,
            right,
            data: vec![0.0; left * size * right],
        }
    }

    /// Builds a core from a closure over `(a, i, b)`.
    pub fn from_fn(
        left: usize,
        size: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(left * size * right);
        for a in 0..left {
            for i in 0..size {
                for b in 0..right {
                    data.push(f(a, i, b));
                }
            }
        }
        Self {
            left,
            size,
            right,
            data,
        }
    }

    #[inline]
    pub fn left(&self) -> usize {
        self.left
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.left, self.size, self.right)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[(a * self.size + i) * self.right + b]
    }

    #[inline]
    pub(crate) fn set(&mut self, a: usize, i: usize, b: usize, value: f64) {
        self.data[(a * self.size + i) * self.right + b] = value;
    }

    /// `(left * size) x right` unfolding.
    pub(crate) fn left_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left * self.size, self.right, &self.data)
    }

    /// `left x (size * right)` unfolding.
    pub(crate) fn right_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left, self.size * self.right, &self.data)
    }

    pub(crate) fn from_left_unfolding(m: &DMatrix<f64>, size: usize) -> Self {
        let left = m.nrows() / size;
        Self {
            left,
            size,
            right: m.ncols(),
            data: row_major(m),
        }
    }

    pub(crate) fn from_right_unfolding(m: &DMatrix<f64>, size: usize) -> Self {
        Self {
            left: m.nrows(),
            size,
            right: m.ncols() / size,
            data: row_major(m),
        }
    }

    /// `v^T * core[:, i, :]` for a row vector `v` of length `left`.
    pub(crate) fn left_contract(&self, v: &[f64], i: usize, out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.right, 0.0);
        for (a, &va) in v.iter().enumerate() {
            if va == 0.0 {
                continue;
            }
            let base = (a * self.size + i) * self.right;
            for (o, &c) in out.iter_mut().zip(&self.data[base..base + self.right]) {
                *o += va * c;
            }
        }
    }

    pub(crate) fn scale_in_place(&mut self, w: f64) {
        for x in &mut self.data {
            *x *= w;
        }
    }
}

pub(crate) fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}
