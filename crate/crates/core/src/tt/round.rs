use nalgebra::DMatrix;

use super::{Core, TensorTrain};

impl TensorTrain {
    /// TT rounding to relative Frobenius accuracy `eps`.
    ///
    /// Left-to-right QR orthogonalization, then a right-to-left sweep of
    /// truncated SVDs with per-bond budget `eps / sqrt(d - 1) * ||A||_F`.
    /// Ranks never increase.
    pub fn round(&self, eps: f64) -> TensorTrain {
        self.round_with(eps, None)
    }

    /// [`round`](Self::round) with an additional hard cap on every bond rank.
    pub fn round_with(&self, eps: f64, max_rank: Option<usize>) -> TensorTrain {
        let d = self.cores.len();
        if d == 1 {
            return self.clone();
        }
        let eps = eps.max(0.0);
        let mut cores = self.cores.clone();

        for k in 0..d - 1 {
            let n = cores[k].size();
            let qr = cores[k].left_unfolding().qr();
            let q = qr.q();
            let r = qr.r();
            cores[k] = Core::from_left_unfolding(&q, n);
            cores[k + 1] = absorb_left(&r, &cores[k + 1]);
        }

        let norm = frobenius(cores[d - 1].data());
        let delta = eps / ((d - 1) as f64).sqrt() * norm;

        for k in (1..d).rev() {
            let n = cores[k].size();
            let (u, s, vt) = sorted_svd(&cores[k].right_unfolding());
            let keep = truncation_rank(&s, delta, max_rank);
            let vt_k = vt.rows(0, keep).into_owned();
            let mut us = u.columns(0, keep).into_owned();
            for (j, mut col) in us.column_iter_mut().enumerate() {
                col *= s[j];
            }
            cores[k] = Core::from_right_unfolding(&vt_k, n);
            cores[k - 1] = absorb_right(&cores[k - 1], &us);
        }
        TensorTrain { cores }
    }
}

/// Smallest rank whose discarded tail has Frobenius norm at most `delta`.
pub(crate) fn truncation_rank(s: &[f64], delta: f64, cap: Option<usize>) -> usize {
    let mut tail = 0.0;
    let mut keep = s.len();
    for j in (0..s.len()).rev() {
        tail += s[j] * s[j];
        if tail.sqrt() > delta {
            break;
        }
        keep = j;
    }
    let keep = keep.max(1);
    match cap {
        Some(c) => keep.min(c.max(1)),
        None => keep,
    }
}

/// Thin SVD `m = U diag(s) V^T` with singular values in non-increasing
/// order.
///
/// Computed with faer: nalgebra's SVD loses accuracy on some small
/// rectangular shapes, which rounding cannot tolerate.
pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    let k = r.min(c);
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = match fm.thin_svd() {
        Ok(svd) => svd,
        // non-convergence only happens on non-finite input
        Err(_) => return (DMatrix::zeros(r, k), vec![f64::NAN; k], DMatrix::zeros(k, c)),
    };
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u_sorted = DMatrix::from_fn(r, k, |i, j| u[(i, order[j])]);
    let vt_sorted = DMatrix::from_fn(k, c, |i, j| v[(j, order[i])]);
    let s_sorted = order.iter().map(|&j| s[j]).collect();
    (u_sorted, s_sorted, vt_sorted)
}

/// `m * core` contracting `m`'s columns with the core's left bond.
pub(crate) fn absorb_left(m: &DMatrix<f64>, core: &Core) -> Core {
    let n = core.size();
    let prod = m * core.right_unfolding();
    Core::from_right_unfolding(&prod, n)
}

/// `core * m` contracting the core's right bond with `m`'s rows.
pub(crate) fn absorb_right(core: &Core, m: &DMatrix<f64>) -> Core {
    let n = core.size();
    let prod = core.left_unfolding() * m;
    Core::from_left_unfolding(&prod, n)
}

fn frobenius(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
