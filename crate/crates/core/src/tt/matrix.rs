use super::{check_index, validate_chain, Core, TensorTrain};
use crate::error::{Error, Result};

/// One order-4 operator core, shape `(left, rows, cols, right)`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatCore {
    left: usize,
    rows: usize,
    cols: usize,
    right: usize,
    data: Vec<f64>,
}

impl MatCore {
    pub fn new(left: usize, rows: usize, cols: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || rows == 0 || cols == 0 || right == 0 {
            return Err(Error::Dimension(format!(
                "operator core shape ({left}, {rows}, {cols}, {right}) has a zero extent"
            )));
        }
        if data.len() != left * rows * cols * right {
            return Err(Error::Dimension(format!(
                "operator core shape ({left}, {rows}, {cols}, {right}) needs {} values, got {}",
                left * rows * cols * right,
                data.len()
            )));
        }
        Ok(Self {
            left,
            rows,
            cols,
            right,
            data,
        })
    }

    pub fn from_fn(
        left: usize,
        rows: usize,
        cols: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(left * rows * cols * right);
        for a in 0..left {
            for i in 0..rows {
                for j in 0..cols {
                    for b in 0..right {
                        data.push(f(a, i, j, b));
                    }
                }
            }
        }
        Self {
            left,
            rows,
            cols,
            right,
            data,
        }
    }

    /// Assemble a core from a `left x right` grid of `rows x cols` blocks.
    /// `blocks[a][b]` is row-major; `None` is a zero block.
    pub fn from_blocks(rows: usize, cols: usize, blocks: &[Vec<Option<Vec<f64>>>]) -> Result<Self> {
        let left = blocks.len();
        let right = blocks.first().map_or(0, Vec::len);
        if blocks.iter().any(|row| row.len() != right) {
            return Err(Error::Dimension("ragged block layout".into()));
        }
        for blk in blocks.iter().flatten().flatten() {
            if blk.len() != rows * cols {
                return Err(Error::Dimension(format!(
                    "block of {} values in a {rows}x{cols} operator core",
                    blk.len()
                )));
            }
        }
        Ok(Self::from_fn(left, rows, cols, right, |a, i, j, b| {
            blocks[a][b].as_ref().map_or(0.0, |m| m[i * cols + j])
        }))
    }

    #[inline]
    pub fn left(&self) -> usize {
        self.left
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.left, self.rows, self.cols, self.right)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, j: usize, b: usize) -> f64 {
        self.data[((a * self.rows + i) * self.cols + j) * self.right + b]
    }
}

/// An operator on a product grid in tensor-train form: core `k` carries the
/// row digit `i_k` and the column digit `j_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TtMatrix {
    cores: Vec<MatCore>,
}

impl TtMatrix {
    pub fn new(cores: Vec<MatCore>) -> Result<Self> {
        validate_chain(cores.iter().map(|c| (c.left, c.right)))?;
        Ok(Self { cores })
    }

    /// Identity operator on the given digit sizes.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        Self::new(
            dims.iter()
                .map(|&n| MatCore::from_fn(1, n, n, 1, |_, i, j, _| if i == j { 1.0 } else { 0.0 }))
                .collect(),
        )
    }

    /// Diagonal operator `diag(v_1) ⊗ ... ⊗ diag(v_d)`.
    pub fn diagonal(factors: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            factors
                .iter()
                .map(|v| {
                    MatCore::from_fn(1, v.len(), v.len(), 1, |_, i, j, _| if i == j { v[i] } else { 0.0 })
                })
                .collect(),
        )
    }

    pub fn cores(&self) -> &[MatCore] {
        &self.cores
    }

    pub fn num_cores(&self) -> usize {
        self.cores.len()
    }

    pub fn row_dims(&self) -> Vec<usize> {
        self.cores.iter().map(MatCore::rows).collect()
    }

    pub fn col_dims(&self) -> Vec<usize> {
        self.cores.iter().map(MatCore::cols).collect()
    }

    pub fn bond_ranks(&self) -> Vec<usize> {
        self.cores.iter().skip(1).map(MatCore::left).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.bond_ranks().into_iter().max().unwrap_or(1)
    }

    /// Entry at row multi-index `row` and column multi-index `col`.
    pub fn eval(&self, row: &[usize], col: &[usize]) -> Result<f64> {
        check_index(&self.row_dims(), row)?;
        check_index(&self.col_dims(), col)?;
        let mut v = vec![1.0];
        for ((core, &i), &j) in self.cores.iter().zip(row).zip(col) {
            let mut next = vec![0.0; core.right];
            for (a, &va) in v.iter().enumerate() {
                for (b, nb) in next.iter_mut().enumerate() {
                    *nb += va * core.get(a, i, j, b);
                }
            }
            v = next;
        }
        Ok(v[0])
    }

    /// Fuse `(row, col)` digits into one index of size `rows * cols`
    /// (row-major), giving a vector train that reuses vector algorithms.
    pub fn to_fused(&self) -> TensorTrain {
        TensorTrain {
            cores: self
                .cores
                .iter()
                .map(|c| {
                    Core::new(c.left, c.rows * c.cols, c.right, c.data.clone())
                        .expect("operator core layout matches fused layout")
                })
                .collect(),
        }
    }

    /// Inverse of [`to_fused`](Self::to_fused).
    pub fn from_fused(tt: &TensorTrain, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if tt.num_cores() != rows.len() || rows.len() != cols.len() {
            return Err(Error::Dimension("fused digit layout does not match train".into()));
        }
        let cores = tt
            .cores()
            .iter()
            .zip(rows.iter().zip(cols))
            .map(|(c, (&m, &n))| {
                if c.size() != m * n {
                    return Err(Error::Dimension(format!(
                        "fused core of size {} cannot split into {m}x{n}",
                        c.size()
                    )));
                }
                MatCore::new(c.left(), m, n, c.right(), c.data().to_vec())
            })
            .collect::<Result<_>>()?;
        Self::new(cores)
    }

    /// Rounding through the fused vector representation.
    pub fn round(&self, eps: f64) -> TtMatrix {
        let fused = self.to_fused().round(eps);
        Self::from_fused(&fused, &self.row_dims(), &self.col_dims()).expect("round preserves layout")
    }

    pub fn scale(&self, w: f64) -> TtMatrix {
        let mut out = self.clone();
        for x in &mut out.cores[0].data {
            *x *= w;
        }
        out
    }

    pub fn add(&self, other: &TtMatrix) -> Result<TtMatrix> {
        if self.row_dims() != other.row_dims() || self.col_dims() != other.col_dims() {
            return Err(Error::Dimension("cannot add operators of different shapes".into()));
        }
        let sum = self.to_fused().add(&other.to_fused())?;
        Self::from_fused(&sum, &self.row_dims(), &self.col_dims())
    }

    pub fn transpose(&self) -> TtMatrix {
        TtMatrix {
            cores: self
                .cores
                .iter()
                .map(|c| MatCore::from_fn(c.left, c.cols, c.rows, c.right, |a, i, j, b| c.get(a, j, i, b)))
                .collect(),
        }
    }

    /// Matrix-vector product. Output bond ranks are `rank(m) * rank(v)`.
    pub fn apply(&self, v: &TensorTrain) -> Result<TensorTrain> {
        if self.col_dims() != v.dims() {
            return Err(Error::Dimension(format!(
                "operator with column dims {:?} applied to vector with dims {:?}",
                self.col_dims(),
                v.dims()
            )));
        }
        let cores = self
            .cores
            .iter()
            .zip(v.cores())
            .map(|(m, x)| {
                let (ml, rows, cols, mr) = m.shape();
                let (xl, _, xr) = x.shape();
                let mut out = Core::zeros(ml * xl, rows, mr * xr);
                for a in 0..ml {
                    for i in 0..rows {
                        for j in 0..cols {
                            for b in 0..mr {
                                let w = m.get(a, i, j, b);
                                if w == 0.0 {
                                    continue;
                                }
                                for c in 0..xl {
                                    for e in 0..xr {
                                        let idx_l = a * xl + c;
                                        let idx_r = b * xr + e;
                                        let cur = out.get(idx_l, i, idx_r);
                                        out.set(idx_l, i, idx_r, cur + w * x.get(c, j, e));
                                    }
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        TensorTrain::new(cores)
    }

    /// Operator product `self * other`. Output bond ranks multiply.
    pub fn matmul(&self, other: &TtMatrix) -> Result<TtMatrix> {
        if self.col_dims() != other.row_dims() {
            return Err(Error::Dimension(format!(
                "cannot multiply operators with inner dims {:?} and {:?}",
                self.col_dims(),
                other.row_dims()
            )));
        }
        let cores = self
            .cores
            .iter()
            .zip(&other.cores)
            .map(|(p, q)| {
                let (pl, rows, inner, pr) = p.shape();
                let (ql, _, cols, qr) = q.shape();
                MatCore::from_fn(pl * ql, rows, cols, pr * qr, |l, i, j, r| {
                    let (a, c) = (l / ql, l % ql);
                    let (b, e) = (r / qr, r % qr);
                    (0..inner).map(|k| p.get(a, i, k, b) * q.get(c, k, j, e)).sum()
                })
            })
            .collect();
        TtMatrix::new(cores)
    }

    /// Kronecker product: cores of `self` followed by cores of `other`.
    pub fn kron(&self, other: &TtMatrix) -> TtMatrix {
        let mut cores = self.cores.clone();
        cores.extend(other.cores.iter().cloned());
        TtMatrix { cores }
    }

    /// Dense row-major matrix. Only sensible for small operators.
    pub fn to_dense(&self) -> (usize, usize, Vec<f64>) {
        let nrows: usize = self.row_dims().iter().product();
        let ncols: usize = self.col_dims().iter().product();
        let fused = self.to_fused().to_dense();
        // fused order interleaves (i_1 j_1 i_2 j_2 ...); unpick it.
        let rd = self.row_dims();
        let cd = self.col_dims();
        let mut out = vec![0.0; nrows * ncols];
        for (flat, &v) in fused.iter().enumerate() {
            let mut rem = flat;
            let mut row = 0usize;
            let mut col = 0usize;
            let mut rmul = 1usize;
            let mut cmul = 1usize;
            for k in (0..rd.len()).rev() {
                let digit = rem % (rd[k] * cd[k]);
                rem /= rd[k] * cd[k];
                row += (digit / cd[k]) * rmul;
                col += (digit % cd[k]) * cmul;
                rmul *= rd[k];
                cmul *= cd[k];
            }
            out[row * ncols + col] = v;
        }
        (nrows, ncols, out)
    }
}
