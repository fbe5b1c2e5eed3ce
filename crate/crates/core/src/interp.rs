//! Off-grid evaluation of a lattice train.
//!
//! Between two neighbouring lattice points the noise-free Laplacian GP mean
//! is the conditional mean of an Ornstein-Uhlenbeck bridge, a sinh-weighted
//! blend of the two endpoint values; for large length scales it tends to
//! linear interpolation. Either way the query touches two points per
//! feature, so the coefficient vector per feature is a train of rank at most
//! 2 and the full query is its Kronecker product dotted with the data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::LatticeAxis;
use crate::tt::{Core, TensorTrain};

/// How weights between bracketing lattice points are formed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InterpMode {
    /// Multilinear interpolation.
    Linear,
    /// OU-bridge weights with the given length scale (normalized units).
    Sinh { length_scale: f64 },
}

/// Weights on the lower and upper bracketing points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BridgeWeights {
    pub c0: f64,
    pub c1: f64,
}

/// `sinh(p) / sinh(q)` for `0 <= p <= q`, without overflow.
fn sinh_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    (p - q).exp() * (-2.0 * p).exp_m1() / (-2.0 * q).exp_m1()
}

/// Bridge weights for `x0 <= x_star <= x1`.
pub fn bridge_weights(x0: f64, x1: f64, x_star: f64, mode: InterpMode) -> Result<BridgeWeights> {
    if !(x0 < x1) {
        return Err(Error::Domain(format!("degenerate interval [{x0}, {x1}]")));
    }
    if !(x0..=x1).contains(&x_star) {
        return Err(Error::Domain(format!("{x_star} outside [{x0}, {x1}]")));
    }
    let w = match mode {
        InterpMode::Linear => BridgeWeights {
            c0: (x1 - x_star) / (x1 - x0),
            c1: (x_star - x0) / (x1 - x0),
        },
        InterpMode::Sinh { length_scale } => {
            if !(length_scale > 0.0) {
                return Err(Error::Domain(format!("length scale {length_scale} must be positive")));
            }
            let q = (x1 - x0) / length_scale;
            BridgeWeights {
                c0: sinh_ratio((x1 - x_star) / length_scale, q),
                c1: sinh_ratio((x_star - x0) / length_scale, q),
            }
        }
    };
    Ok(w)
}

/// Lattice bracket of a coordinate: lower index `k0` (at most `2^n - 2`)
/// and the offset in `[0, 1]` towards `k0 + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub k0: usize,
    pub offset: f64,
}

/// Bracket of `x` on `axis`. Grid points get offset 0, the top edge maps to
/// `(2^n - 2, 1)`.
pub fn bracket(axis: &LatticeAxis, x: f64) -> Result<Bracket> {
    let slack = 1e-12 * (axis.max - axis.min);
    if !(x >= axis.min - slack && x <= axis.max + slack) {
        return Err(Error::Domain(format!(
            "{x} outside [{}, {}]",
            axis.min, axis.max
        )));
    }
    let top = axis.points() - 1;
    let u = axis.normalize(x).clamp(0.0, 1.0) * top as f64;
    let k0 = (u.floor() as usize).min(top - 1);
    Ok(Bracket {
        k0,
        offset: (u - k0 as f64).clamp(0.0, 1.0),
    })
}

/// Weights of `x` on its bracket, in normalized units.
pub fn axis_weights(axis: &LatticeAxis, x: f64, mode: InterpMode) -> Result<(usize, BridgeWeights)> {
    let b = bracket(axis, x)?;
    let h = axis.unit_spacing();
    let w = bridge_weights(0.0, h, b.offset * h, mode)?;
    Ok((b.k0, w))
}

/// Train over `2^bits` points holding `c0` at `k0`, `c1` at `k0 + 1` and
/// zeros elsewhere.
///
/// The binary strings of `k0` and `k0 + 1` agree down to the last zero bit
/// of `k0`; bonds along that common prefix have rank 1, the rest rank 2.
pub fn coeff_tt_1d(bits: usize, k0: usize, c0: f64, c1: f64) -> Result<TensorTrain> {
    if bits == 0 {
        return Err(Error::Dimension("coefficient train needs at least one core".into()));
    }
    if k0 + 1 >= 1 << bits {
        return Err(Error::OutOfBounds {
            index: vec![k0],
            shape: vec![(1 << bits) - 1],
        });
    }
    let bit = |k: usize, pos: usize| (k >> (bits - 1 - pos)) & 1;
    let e = |b: usize| move |i: usize| if i == b { 1.0 } else { 0.0 };
    // core where k0 has its last zero bit and k0 + 1 its last one bit
    let split = bits - 1 - k0.trailing_ones() as usize;
    let mut cores = Vec::with_capacity(bits);
    for k in 0..split {
        let on = e(bit(k0, k));
        cores.push(Core::from_fn(1, 2, 1, |_, i, _| on(i)));
    }
    if split == bits - 1 {
        cores.push(Core::from_fn(1, 2, 1, |_, i, _| if i == 0 { c0 } else { c1 }));
    } else {
        cores.push(Core::from_fn(1, 2, 2, |_, i, b| e(b)(i)));
        // branch 0 follows k0 (ones), branch 1 follows k0 + 1 (zeros)
        for _ in split + 1..bits - 1 {
            cores.push(Core::from_fn(2, 2, 2, |a, i, b| {
                if a == b {
                    e(1 - a)(i)
                } else {
                    0.0
                }
            }));
        }
        cores.push(Core::from_fn(2, 2, 1, |a, i, _| {
            if a == 0 {
                c0 * e(1)(i)
            } else {
                c1 * e(0)(i)
            }
        }));
    }
    TensorTrain::new(cores)
}

/// Kronecker product of the per-feature coefficient trains of `x_star`.
pub fn coeff_tt(axes: &[LatticeAxis], x_star: &[f64], mode: InterpMode) -> Result<TensorTrain> {
    check_query(axes, x_star)?;
    let mut out: Option<TensorTrain> = None;
    for (ax, &x) in axes.iter().zip(x_star) {
        let (k0, w) = axis_weights(ax, x, mode)?;
        let v = coeff_tt_1d(ax.bits, k0, w.c0, w.c1)?;
        out = Some(match out {
            None => v,
            Some(acc) => acc.kron(&v),
        });
    }
    Ok(out.expect("at least one feature"))
}

fn check_query(axes: &[LatticeAxis], x_star: &[f64]) -> Result<()> {
    if axes.is_empty() || x_star.len() != axes.len() {
        return Err(Error::Dimension(format!(
            "query has {} features, grid has {}",
            x_star.len(),
            axes.len()
        )));
    }
    Ok(())
}

/// `coeff_tt(x*) . y`: the weighted sum of `y` over the `2^F` corners of the
/// cell containing `x_star`.
pub fn interp_eval(y: &TensorTrain, axes: &[LatticeAxis], x_star: &[f64], mode: InterpMode) -> Result<f64> {
    coeff_tt(axes, x_star, mode)?.dot(y)
}

/// Repeated evaluation of one lattice train.
///
/// Contracts the coefficient train core by core without building it: the
/// two branches of each feature share the left vector along the common
/// prefix and merge with their weights at the feature's last core.
#[derive(Clone, Debug)]
pub struct Interpolator {
    y: TensorTrain,
    axes: Vec<LatticeAxis>,
    mode: InterpMode,
}

impl Interpolator {
    pub fn new(y: TensorTrain, axes: Vec<LatticeAxis>, mode: InterpMode) -> Result<Self> {
        let cores: usize = axes.iter().map(|a| a.bits).sum();
        if axes.is_empty() || y.num_cores() != cores || y.dims().iter().any(|&n| n != 2) {
            return Err(Error::Dimension(format!(
                "train with dims {:?} does not match a lattice of {cores} binary cores",
                y.dims()
            )));
        }
        Ok(Self { y, axes, mode })
    }

    pub fn train(&self) -> &TensorTrain {
        &self.y
    }

    pub fn axes(&self) -> &[LatticeAxis] {
        &self.axes
    }

    pub fn mode(&self) -> InterpMode {
        self.mode
    }

    pub fn eval(&self, x_star: &[f64]) -> Result<f64> {
        check_query(&self.axes, x_star)?;
        let cores = self.y.cores();
        let mut v = vec![1.0];
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let mut tmp = Vec::new();
        let mut offset = 0;
        for (ax, &x) in self.axes.iter().zip(x_star) {
            let (k0, w) = axis_weights(ax, x, self.mode)?;
            let n = ax.bits;
            let bit = |k: usize, pos: usize| (k >> (n - 1 - pos)) & 1;
            let split = n - 1 - k0.trailing_ones() as usize;
            for pos in 0..split {
                cores[offset + pos].left_contract(&v, bit(k0, pos), &mut tmp);
                std::mem::swap(&mut v, &mut tmp);
            }
            lo.clone_from(&v);
            hi.clone_from(&v);
            for pos in split..n {
                let core = &cores[offset + pos];
                if w.c0 != 0.0 {
                    core.left_contract(&lo, bit(k0, pos), &mut tmp);
                    std::mem::swap(&mut lo, &mut tmp);
                }
                if w.c1 != 0.0 {
                    core.left_contract(&hi, bit(k0 + 1, pos), &mut tmp);
                    std::mem::swap(&mut hi, &mut tmp);
                }
            }
            v.clear();
            let width = cores[offset + n - 1].right();
            v.resize(width, 0.0);
            if w.c0 != 0.0 {
                v.iter_mut().zip(&lo).for_each(|(o, l)| *o += w.c0 * l);
            }
            if w.c1 != 0.0 {
                v.iter_mut().zip(&hi).for_each(|(o, h)| *o += w.c1 * h);
            }
            offset += n;
        }
        Ok(v[0])
    }

    /// Serial batch evaluation.
    pub fn eval_batch(&self, queries: &[Vec<f64>]) -> Result<Vec<f64>> {
        queries.iter().map(|q| self.eval(q)).collect()
    }

    /// Batch evaluation spread over the rayon pool.
    pub fn par_eval_batch(&self, queries: &[Vec<f64>]) -> Result<Vec<f64>> {
        queries.par_iter().map(|q| self.eval(q)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{stn_gpr_mean, LatticeKernelSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn axis(min: f64, max: f64, bits: usize) -> LatticeAxis {
        LatticeAxis { min, max, bits }
    }

    fn close(a: BridgeWeights, c0: f64, c1: f64, tol: f64) -> bool {
        (a.c0 - c0).abs() <= tol && (a.c1 - c1).abs() <= tol
    }

    #[test]
    fn bridge_endpoints_and_midpoint() {
        for mode in [InterpMode::Linear, InterpMode::Sinh { length_scale: 0.3 }] {
            assert!(close(bridge_weights(0.0, 1.0, 0.0, mode).unwrap(), 1.0, 0.0, 1e-15));
            assert!(close(bridge_weights(0.0, 1.0, 1.0, mode).unwrap(), 0.0, 1.0, 1e-15));
        }
        assert!(close(bridge_weights(2.0, 4.0, 3.0, InterpMode::Linear).unwrap(), 0.5, 0.5, 1e-15));
        assert!(bridge_weights(1.0, 1.0, 1.0, InterpMode::Linear).is_err());
        assert!(bridge_weights(0.0, 1.0, 1.5, InterpMode::Linear).is_err());
    }

    #[test]
    fn sinh_weights_direct() {
        let w = bridge_weights(0.0, 1.0, 0.25, InterpMode::Sinh { length_scale: 0.5 }).unwrap();
        let d = 2f64.sinh();
        assert!(close(w, 1.5f64.sinh() / d, 0.5f64.sinh() / d, 1e-14));
        // short length scales stay finite
        let w = bridge_weights(0.0, 1.0, 0.5, InterpMode::Sinh { length_scale: 1e-4 }).unwrap();
        assert!(w.c0.is_finite() && w.c0 >= 0.0 && w.c0 < 1e-100);
    }

    #[test]
    fn large_length_scale_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x: f64 = rng.random();
            let s = bridge_weights(0.0, 1.0, x, InterpMode::Sinh { length_scale: 1e6 }).unwrap();
            let l = bridge_weights(0.0, 1.0, x, InterpMode::Linear).unwrap();
            assert!(close(s, l.c0, l.c1, 1e-9));
        }
    }

    #[test]
    fn coeff_rank_one_at_origin() {
        let tt = coeff_tt_1d(3, 0, 0.3, 0.7).unwrap();
        assert_eq!(tt.bond_ranks(), vec![1, 1]);
        let want = TensorTrain::from_factors(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        assert_eq!(tt.to_dense(), want.to_dense());
    }

    #[test]
    fn coeff_center_straddle_is_rank_two() {
        let tt = coeff_tt_1d(3, 3, 0.4, 0.6).unwrap();
        assert_eq!(tt.bond_ranks(), vec![2, 2]);
        let d = tt.to_dense();
        assert_eq!((d[3], d[4]), (0.4, 0.6));
        assert!(coeff_tt_1d(3, 7, 1.0, 0.0).is_err());
    }

    #[test]
    fn coeff_rank_profile_exhaustive() {
        for n in 1..=8 {
            for k0 in 0..(1usize << n) - 1 {
                let tt = coeff_tt_1d(n, k0, 0.25, 0.5).unwrap();
                let common = (0..n)
                    .take_while(|&p| (k0 >> (n - 1 - p)) & 1 == ((k0 + 1) >> (n - 1 - p)) & 1)
                    .count();
                let want: Vec<usize> = (1..n).map(|bond| if bond <= common { 1 } else { 2 }).collect();
                assert_eq!(tt.bond_ranks(), want, "n={n} k0={k0}");
                let d = tt.to_dense();
                let nz: Vec<usize> = (0..d.len()).filter(|&i| d[i] != 0.0).collect();
                assert_eq!(nz, vec![k0, k0 + 1]);
                assert_eq!((d[k0], d[k0 + 1]), (0.25, 0.5));
            }
        }
    }

    #[test]
    fn grid_points_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let axes = vec![axis(0.0, 1.0, 2), axis(5.0, 9.0, 3)];
        let y = TensorTrain::random(&[2; 5], &[2, 3, 3, 2], &mut rng).unwrap();
        let ip = Interpolator::new(y.clone(), axes.clone(), InterpMode::Linear).unwrap();
        for i0 in 0..4 {
            for i1 in 0..8 {
                let x = [i0 as f64 / 3.0, 5.0 + 4.0 * i1 as f64 / 7.0];
                let idx = [(i0 >> 1) & 1, i0 & 1, (i1 >> 2) & 1, (i1 >> 1) & 1, i1 & 1];
                let want = y.eval(&idx).unwrap();
                let got = interp_eval(&y, &axes, &x, InterpMode::Linear).unwrap();
                assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0), "{got} vs {want}");
                assert!((ip.eval(&x).unwrap() - want).abs() <= 1e-14 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reproduces_multilinear_functions() {
        let axes = vec![axis(-1.0, 1.0, 3), axis(0.0, 2.0, 2), axis(10.0, 11.0, 2)];
        let f = |x: &[f64]| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2] + 3.0 * x[0] * x[1] * x[2];
        let pts = |ax: &LatticeAxis| -> Vec<f64> {
            (0..ax.points()).map(|i| ax.min + (ax.max - ax.min) * i as f64 / (ax.points() - 1) as f64).collect()
        };
        // assemble y from per-feature trains so no global SVD blurs it
        let coord = |f: usize| TensorTrain::from_dense(&vec![2; axes[f].bits], &pts(&axes[f]), 0.0).unwrap();
        let ones = |f: usize| TensorTrain::ones(&vec![2; axes[f].bits]).unwrap();
        let term = |parts: [Option<f64>; 3]| {
            let tt: Vec<TensorTrain> =
                (0..3).map(|f| if parts[f].is_some() { coord(f) } else { ones(f) }).collect();
            let w: f64 = parts.iter().flatten().product();
            tt[0].kron(&tt[1]).kron(&tt[2]).scale(if parts.iter().all(Option::is_none) { 1.0 } else { w })
        };
        let y = [
            term([None, None, None]),
            term([Some(2.0), None, None]),
            term([None, Some(-1.0), None]),
            term([None, None, Some(0.5)]),
            term([Some(3.0), Some(1.0), Some(1.0)]),
        ]
        .iter()
        .skip(1)
        .fold(term([None, None, None]), |acc, t| acc.add(t).unwrap());
        let ip = Interpolator::new(y, axes.clone(), InterpMode::Linear).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x: Vec<f64> = axes.iter().map(|a| rng.random_range(a.min..=a.max)).collect();
            let got = ip.eval(&x).unwrap();
            assert!((got - f(&x)).abs() < 1e-12, "{got} vs {}", f(&x));
        }
    }

    fn corner_sum(y: &TensorTrain, axes: &[LatticeAxis], x: &[f64]) -> f64 {
        let parts: Vec<(usize, BridgeWeights)> =
            axes.iter().zip(x).map(|(a, &v)| axis_weights(a, v, InterpMode::Linear).unwrap()).collect();
        let mut total = 0.0;
        for mask in 0..1usize << axes.len() {
            let mut w = 1.0;
            let mut idx = Vec::new();
            for (f, (ax, (k0, bw))) in axes.iter().zip(&parts).enumerate() {
                let up = (mask >> f) & 1;
                w *= if up == 1 { bw.c1 } else { bw.c0 };
                let k = k0 + up;
                idx.extend((0..ax.bits).map(|p| (k >> (ax.bits - 1 - p)) & 1));
            }
            total += w * y.eval(&idx).unwrap();
        }
        total
    }

    #[test]
    fn matches_corner_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let axes = vec![axis(0.0, 1.0, 3), axis(-3.0, 3.0, 3), axis(1.0, 2.0, 3)];
        let y = TensorTrain::random(&[2; 9], &[2, 3, 4, 4, 4, 4, 3, 2], &mut rng).unwrap();
        let ip = Interpolator::new(y.clone(), axes.clone(), InterpMode::Linear).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = axes.iter().map(|a| rng.random_range(a.min..=a.max)).collect();
            let want = corner_sum(&y, &axes, &x);
            assert!((interp_eval(&y, &axes, &x, InterpMode::Linear).unwrap() - want).abs() < 1e-10);
            assert!((ip.eval(&x).unwrap() - want).abs() < 1e-10);
        }
        let batch: Vec<Vec<f64>> = (0..20)
            .map(|_| axes.iter().map(|a| rng.random_range(a.min..=a.max)).collect())
            .collect();
        assert_eq!(ip.eval_batch(&batch).unwrap(), ip.par_eval_batch(&batch).unwrap());
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let axes = vec![axis(0.0, 1.0, 2)];
        let y = TensorTrain::ones(&[2, 2]).unwrap();
        assert!(matches!(interp_eval(&y, &axes, &[1.2], InterpMode::Linear), Err(Error::Domain(_))));
        assert!(interp_eval(&y, &axes, &[0.5, 0.5], InterpMode::Linear).is_err());
    }

    #[test]
    fn sinh_mode_matches_gp_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let axes = vec![axis(0.0, 2.0, 2), axis(-1.0, 1.0, 3)];
        let y = TensorTrain::random(&[2; 5], &[2, 2, 2, 2], &mut rng).unwrap();
        for l in [0.05, 0.4, 3.0] {
            let spec = LatticeKernelSpec::new(axes.clone(), l).unwrap();
            let mode = InterpMode::Sinh { length_scale: l };
            let ip = Interpolator::new(y.clone(), axes.clone(), mode).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = axes.iter().map(|a| rng.random_range(a.min..=a.max)).collect();
                let gp = stn_gpr_mean(&y, &spec, &x).unwrap();
                assert!((ip.eval(&x).unwrap() - gp).abs() < 1e-9, "L={l}");
            }
        }
    }

    proptest! {
        #[test]
        fn linear_mode_is_convex(seed in any::<u64>(), u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let axes = vec![axis(0.0, 1.0, 3), axis(0.0, 1.0, 2)];
            let y = TensorTrain::random(&[2; 5], &[2, 2, 2, 2], &mut rng).unwrap();
            let ip = Interpolator::new(y.clone(), axes.clone(), InterpMode::Linear).unwrap();
            let x = [u, v];
            let got = ip.eval(&x).unwrap();
            let mut corners = Vec::new();
            let (b0, b1) = (bracket(&axes[0], u).unwrap(), bracket(&axes[1], v).unwrap());
            for k in [b0.k0, b0.k0 + 1] {
                for m in [b1.k0, b1.k0 + 1] {
                    let idx = [(k >> 2) & 1, (k >> 1) & 1, k & 1, (m >> 1) & 1, m & 1];
                    corners.push(y.eval(&idx).unwrap());
                }
            }
            let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(got >= lo - 1e-12 && got <= hi + 1e-12);
        }
    }
}
