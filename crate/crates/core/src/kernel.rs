//! Closed-form tensor trains for the Laplacian kernel on a uniform lattice.
//!
//! On `2^n` equally spaced points the kernel matrix is the Toeplitz matrix
//! `[a^{|i-j|}]` with `a = exp(-Δ/L)`. It has an exact rank-3 operator
//! train, its inverse is tridiagonal and has a rank-5 train, and the kernel
//! row of an arbitrary query point is a rank-3 vector train. Several
//! features combine through Kronecker products because the kernel uses the
//! L1 distance.
//!
//! Every feature is mapped affinely onto `[0, 1]` before the length scale is
//! applied, so a single `L` is shared by all features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tt::{Core, MatCore, TensorTrain, TtMatrix};

/// Largest decay used; keeps `1 / (1 - a^2)` finite.
pub const MAX_DECAY: f64 = 1.0 - 1e-12;

/// One feature axis: `2^bits` equally spaced points on `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeAxis {
    pub min: f64,
    pub max: f64,
    pub bits: usize,
}

impl LatticeAxis {
    pub fn points(&self) -> usize {
        1 << self.bits
    }

    /// Lattice spacing after mapping the axis onto `[0, 1]`.
    pub fn unit_spacing(&self) -> f64 {
        1.0 / (self.points() - 1) as f64
    }

    /// Affine map of `x` onto `[0, 1]`.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    /// Fractional lattice coordinate of `x`, checked against the range.
    fn lattice_coord(&self, x: f64) -> Result<f64> {
        let slack = 1e-12 * (self.max - self.min);
        if !(x >= self.min - slack && x <= self.max + slack) {
            return Err(Error::Domain(format!(
                "{x} outside [{}, {}]",
                self.min, self.max
            )));
        }
        let u = self.normalize(x).clamp(0.0, 1.0);
        Ok(u * (self.points() - 1) as f64)
    }
}

/// Laplacian kernel on a product lattice with one shared length scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeKernelSpec {
    pub axes: Vec<LatticeAxis>,
    /// Length scale in normalized units.
    pub length_scale: f64,
}

impl LatticeKernelSpec {
    pub fn new(axes: Vec<LatticeAxis>, length_scale: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Dimension("kernel needs at least one feature".into()));
        }
        for (f, ax) in axes.iter().enumerate() {
            if ax.bits == 0 || ax.bits > 40 {
                return Err(Error::Dimension(format!(
                    "feature {f}: {} bits is outside 1..=40",
                    ax.bits
                )));
            }
            if !(ax.min < ax.max) {
                return Err(Error::Domain(format!(
                    "feature {f}: empty range [{}, {}]",
                    ax.min, ax.max
                )));
            }
        }
        if !(length_scale > 0.0) {
            return Err(Error::Domain(format!("length scale {length_scale} must be positive")));
        }
        Ok(Self { axes, length_scale })
    }

    /// Decay `a = exp(-Δ/L)` of feature `f`, clamped below 1.
    pub fn decay(&self, f: usize) -> f64 {
        (-self.axes[f].unit_spacing() / self.length_scale)
            .exp()
            .min(MAX_DECAY)
    }

    pub fn core_dims(&self) -> Vec<usize> {
        vec![2; self.axes.iter().map(|a| a.bits).sum()]
    }
}

fn pow2_power(a: f64, b: usize) -> f64 {
    a.powf(2f64.powi(b as i32))
}

const I2: [f64; 4] = [1.0, 0.0, 0.0, 1.0];
const SP: [f64; 4] = [0.0, 1.0, 0.0, 0.0];
const SM: [f64; 4] = [0.0, 0.0, 1.0, 0.0];

fn lin(terms: &[(f64, [f64; 4])]) -> Vec<f64> {
    let mut out = vec![0.0; 4];
    for (w, m) in terms {
        for (o, v) in out.iter_mut().zip(m) {
            *o += w * v;
        }
    }
    out
}

/// Rank-3 train of the `2^bits x 2^bits` matrix `[a^{|i-j|}]`, most
/// significant bit first.
pub fn kernel_tt_decay(bits: usize, a: f64) -> Result<TtMatrix> {
    if bits == 0 {
        return Err(Error::Dimension("kernel lattice needs at least 2 points".into()));
    }
    let k1 = vec![1.0, a, a, 1.0];
    let m1 = vec![a * a, a * a * a, a, a * a];
    let m1t = vec![a * a, a, a * a * a, a * a];
    if bits == 1 {
        return TtMatrix::new(vec![MatCore::from_blocks(2, 2, &[vec![Some(k1)]])?]);
    }
    let mut cores = Vec::with_capacity(bits);
    cores.push(MatCore::from_blocks(
        2,
        2,
        &[vec![Some(I2.to_vec()), Some(SP.to_vec()), Some(SM.to_vec())]],
    )?);
    for k in 1..bits - 1 {
        let i = bits - 1 - k;
        let (lo, hi) = (pow2_power(a, i), pow2_power(a, i + 1));
        cores.push(MatCore::from_blocks(
            2,
            2,
            &[
                vec![Some(I2.to_vec()), Some(SP.to_vec()), Some(SM.to_vec())],
                vec![None, Some(lin(&[(lo, I2), (hi, SP), (1.0, SM)])), None],
                vec![None, None, Some(lin(&[(lo, I2), (hi, SM), (1.0, SP)]))],
            ],
        )?);
    }
    cores.push(MatCore::from_blocks(2, 2, &[vec![Some(k1)], vec![Some(m1)], vec![Some(m1t)]])?);
    TtMatrix::new(cores)
}

/// States of the automaton reading `(i, j)` bit pairs MSB first.
#[derive(Clone, Copy, PartialEq, Eq)]
enum InvState {
    /// equal so far, all zeros
    Zeros,
    /// equal so far, all ones
    Ones,
    /// equal so far, both bit values seen
    Mixed,
    /// `j = i + 1` still possible
    Above,
    /// `i = j + 1` still possible
    Below,
}

const INV_STATES: [InvState; 5] = [
    InvState::Zeros,
    InvState::Ones,
    InvState::Mixed,
    InvState::Above,
    InvState::Below,
];

fn inv_step(s: Option<InvState>, i: usize, j: usize) -> Option<InvState> {
    use InvState::*;
    match (s, i, j) {
        (None, 0, 0) => Some(Zeros),
        (None, 1, 1) => Some(Ones),
        (Some(Zeros), 0, 0) => Some(Zeros),
        (Some(Ones), 1, 1) => Some(Ones),
        (Some(Zeros | Ones | Mixed), x, y) if x == y => Some(Mixed),
        (None | Some(Zeros | Ones | Mixed), 0, 1) => Some(Above),
        (None | Some(Zeros | Ones | Mixed), 1, 0) => Some(Below),
        (Some(Above), 1, 0) => Some(Above),
        (Some(Below), 0, 1) => Some(Below),
        _ => None,
    }
}

fn inv_weight(s: InvState, a: f64) -> f64 {
    match s {
        InvState::Zeros | InvState::Ones => 1.0,
        InvState::Mixed => 1.0 + a * a,
        InvState::Above | InvState::Below => -a,
    }
}

/// Rank-5 train of the inverse of `[a^{|i-j|}]`:
/// `1/(1-a^2) * tridiag(-a, 1+a^2, -a)` with unit corners.
pub fn kernel_inv_tt_decay(bits: usize, a: f64) -> Result<TtMatrix> {
    if bits == 0 {
        return Err(Error::Dimension("kernel lattice needs at least 2 points".into()));
    }
    if !(a < 1.0) || a < 0.0 {
        return Err(Error::SingularKernel(a));
    }
    let scale = 1.0 / (1.0 - a * a);
    // Mixed cannot occur after a single bit.
    let states_at = |bond: usize| -> Vec<InvState> {
        if bond == 1 {
            INV_STATES.iter().copied().filter(|&s| s != InvState::Mixed).collect()
        } else {
            INV_STATES.to_vec()
        }
    };
    let mut cores = Vec::with_capacity(bits);
    for k in 0..bits {
        let from: Vec<Option<InvState>> = if k == 0 {
            vec![None]
        } else {
            states_at(k).into_iter().map(Some).collect()
        };
        let last = k == bits - 1;
        let to = if last { Vec::new() } else { states_at(k + 1) };
        let right = if last { 1 } else { to.len() };
        let first_scale = if k == 0 { scale } else { 1.0 };
        cores.push(MatCore::from_fn(from.len(), 2, 2, right, |l, i, j, r| {
            let Some(next) = inv_step(from[l], i, j) else {
                return 0.0;
            };
            let w = if last {
                inv_weight(next, a)
            } else if to[r] == next {
                1.0
            } else {
                0.0
            };
            first_scale * w
        }));
    }
    TtMatrix::new(cores)
}

/// Kernel train of feature `f`.
pub fn kernel_tt(spec: &LatticeKernelSpec, f: usize) -> Result<TtMatrix> {
    kernel_tt_decay(spec.axes[f].bits, spec.decay(f))
}

/// Inverse kernel train of feature `f`.
pub fn kernel_inv_tt(spec: &LatticeKernelSpec, f: usize) -> Result<TtMatrix> {
    kernel_inv_tt_decay(spec.axes[f].bits, spec.decay(f))
}

/// Kronecker product of the per-feature kernels, in feature order.
pub fn multi_kernel_tt(spec: &LatticeKernelSpec) -> Result<TtMatrix> {
    let mut out = kernel_tt(spec, 0)?;
    for f in 1..spec.axes.len() {
        out = out.kron(&kernel_tt(spec, f)?);
    }
    Ok(out)
}

/// Kronecker product of the per-feature inverse kernels.
pub fn multi_kernel_inv_tt(spec: &LatticeKernelSpec) -> Result<TtMatrix> {
    let mut out = kernel_inv_tt(spec, 0)?;
    for f in 1..spec.axes.len() {
        out = out.kron(&kernel_inv_tt(spec, f)?);
    }
    Ok(out)
}

/// Rank-3 train of `[a^{|i-u|}]_i` over `2^bits` lattice points for a
/// fractional lattice coordinate `u` in `[0, 2^bits - 1]`.
///
/// With `k0 = floor(u)` (at most `2^bits - 2`) and `f = u - k0`, entries at
/// `i <= k0` are `a^f a^{k0-i}` and entries above are `a^{1-f} a^{i-k0-1}`.
/// The integer exponents are split over bits into nonnegative powers once
/// the first differing bit of `i` and `k0` is known, so no factor exceeds 1.
pub fn cross_kernel_tt_decay(bits: usize, a: f64, u: f64) -> Result<TensorTrain> {
    if bits == 0 {
        return Err(Error::Dimension("kernel lattice needs at least 2 points".into()));
    }
    let top = ((1usize << bits) - 1) as f64;
    if !(0.0..=top).contains(&u) {
        return Err(Error::Domain(format!("lattice coordinate {u} outside [0, {top}]")));
    }
    let k0 = (u.floor() as usize).min((1 << bits) - 2);
    let frac = u - k0 as f64;
    // states: 0 = equal so far, 1 = i < k0 decided, 2 = i > k0 decided
    let finals = [a.powf(frac), a.powf(1.0 + frac), a.powf(1.0 - frac)];
    let step = |state: usize, i: usize, kb: usize, bit: usize| -> (usize, f64) {
        let g = |x: usize, y: usize| match (x, y) {
            (0, 1) => pow2_power(a, bit + 1),
            (1, 0) => 1.0,
            _ => pow2_power(a, bit),
        };
        match state {
            0 if i == kb => (0, 1.0),
            0 if i < kb => (1, 1.0),
            0 => (2, 1.0),
            1 => (1, g(i, kb)),
            _ => (2, g(kb, i)),
        }
    };
    let mut cores = Vec::with_capacity(bits);
    for k in 0..bits {
        let bit = bits - 1 - k;
        let kb = (k0 >> bit) & 1;
        let left = if k == 0 { 1 } else { 3 };
        let last = k == bits - 1;
        let right = if last { 1 } else { 3 };
        cores.push(Core::from_fn(left, 2, right, |s, i, r| {
            let (next, w) = step(s, i, kb, bit);
            if last {
                w * finals[next]
            } else if next == r {
                w
            } else {
                0.0
            }
        }));
    }
    TensorTrain::new(cores)
}

/// Kernel row `[exp(-Σ_f |x*_f - x_{f,i_f}| / L)]` over the whole lattice as
/// a train with bond ranks at most 3.
pub fn cross_kernel_vector_tt(spec: &LatticeKernelSpec, x_star: &[f64]) -> Result<TensorTrain> {
    if x_star.len() != spec.axes.len() {
        return Err(Error::Dimension(format!(
            "query has {} features, kernel has {}",
            x_star.len(),
            spec.axes.len()
        )));
    }
    let mut out: Option<TensorTrain> = None;
    for (f, (ax, &x)) in spec.axes.iter().zip(x_star).enumerate() {
        let v = cross_kernel_tt_decay(ax.bits, spec.decay(f), ax.lattice_coord(x)?)?;
        out = Some(match out {
            None => v,
            Some(acc) => acc.kron(&v),
        });
    }
    Ok(out.expect("at least one feature"))
}

/// GP posterior mean `k(x*, X) K^{-1} y` with `y` given on the full lattice.
pub fn stn_gpr_mean(y: &TensorTrain, spec: &LatticeKernelSpec, x_star: &[f64]) -> Result<f64> {
    StnGpr::fit(y, spec.clone())?.predict(x_star)
}

/// Noise-free GP on a full lattice with `alpha = K^{-1} y` kept in TT form.
#[derive(Clone, Debug)]
pub struct StnGpr {
    spec: LatticeKernelSpec,
    alpha: TensorTrain,
}

impl StnGpr {
    pub fn fit(y: &TensorTrain, spec: LatticeKernelSpec) -> Result<Self> {
        if y.dims() != spec.core_dims() {
            return Err(Error::Dimension(format!(
                "training train has dims {:?}, lattice needs {:?}",
                y.dims(),
                spec.core_dims()
            )));
        }
        let alpha = multi_kernel_inv_tt(&spec)?.apply(y)?;
        Ok(Self { spec, alpha })
    }

    pub fn spec(&self) -> &LatticeKernelSpec {
        &self.spec
    }

    pub fn alpha(&self) -> &TensorTrain {
        &self.alpha
    }

    pub fn predict(&self, x_star: &[f64]) -> Result<f64> {
        cross_kernel_vector_tt(&self.spec, x_star)?.dot(&self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toeplitz(n: usize, a: f64) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| a.powi((i as i32 - j as i32).abs()))
    }

    fn dense(m: &TtMatrix) -> DMatrix<f64> {
        let (r, c, data) = m.to_dense();
        DMatrix::from_row_slice(r, c, &data)
    }

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn one_bit_kernel() {
        let k = dense(&kernel_tt_decay(1, 0.5).unwrap());
        assert_eq!(k, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        assert!(kernel_tt_decay(0, 0.5).is_err());
    }

    #[test]
    fn kernel_matches_toeplitz() {
        for n in 1..=6 {
            for a in [0.1, 0.5, 0.7, 0.9, 0.99] {
                let tt = kernel_tt_decay(n, a).unwrap();
                let err = max_abs(&(dense(&tt) - toeplitz(1 << n, a)));
                assert!(err <= 1e-12, "n={n} a={a} err={err}");
                if n >= 2 {
                    assert!(tt.bond_ranks().iter().all(|&r| r == 3));
                }
            }
        }
    }

    #[test]
    fn zero_decay_is_identity() {
        let k = dense(&kernel_tt_decay(3, 0.0).unwrap());
        assert_eq!(k, DMatrix::identity(8, 8));
    }

    #[test]
    fn inverse_small() {
        let k = dense(&kernel_inv_tt_decay(1, 0.5).unwrap());
        let want = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]) / 0.75;
        assert!(max_abs(&(k - want)) < 1e-15);
        assert!(matches!(kernel_inv_tt_decay(2, 1.0), Err(Error::SingularKernel(_))));
    }

    #[test]
    fn inverse_matches_dense_solve() {
        for n in 1..=6 {
            for a in [0.1, 0.3, 0.5, 0.9, 0.99] {
                let inv = kernel_inv_tt_decay(n, a).unwrap();
                assert!(inv.bond_ranks().iter().all(|&r| r <= 5));
                let kinv = dense(&inv);
                let k = toeplitz(1 << n, a);
                let err = max_abs(&(&k * &kinv - DMatrix::identity(1 << n, 1 << n)));
                assert!(err <= 1e-9, "n={n} a={a} err={err}");
                assert!(max_abs(&(&kinv - kinv.transpose())) <= 1e-12);
            }
        }
        let oracle = toeplitz(8, 0.9).try_inverse().unwrap();
        assert!(max_abs(&(dense(&kernel_inv_tt_decay(3, 0.9).unwrap()) - oracle)) < 1e-8);
    }

    #[test]
    fn kernel_is_positive_definite() {
        for n in 1..=6 {
            for a in [0.1, 0.5, 0.9, 0.99] {
                let k = dense(&kernel_tt_decay(n, a).unwrap());
                let min = k.symmetric_eigenvalues().min();
                assert!(min > 0.0, "n={n} a={a} min eig {min}");
            }
        }
    }

    #[test]
    fn two_feature_kronecker() {
        let (a, b) = (0.5, 0.25);
        let m = kernel_tt_decay(1, a).unwrap().kron(&kernel_tt_decay(1, b).unwrap());
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, b, a, a * b, b, 1.0, a * b, a, a, a * b, 1.0, b, a * b, a, b, 1.0,
            ],
        );
        assert!(max_abs(&(dense(&m) - want)) < 1e-15);
    }

    #[test]
    fn multi_kernel_follows_features() {
        let axes = vec![
            LatticeAxis { min: 0.0, max: 1.0, bits: 1 },
            LatticeAxis { min: -2.0, max: 5.0, bits: 1 },
            LatticeAxis { min: 3.0, max: 4.0, bits: 1 },
        ];
        let spec = LatticeKernelSpec::new(axes, 0.8).unwrap();
        let k = dense(&multi_kernel_tt(&spec).unwrap());
        let a: Vec<f64> = (0..3).map(|f| spec.decay(f)).collect();
        let want = toeplitz(2, a[0]).kronecker(&toeplitz(2, a[1])).kronecker(&toeplitz(2, a[2]));
        assert!(max_abs(&(k - want)) < 1e-12);
        let kinv = dense(&multi_kernel_inv_tt(&spec).unwrap());
        let k = dense(&multi_kernel_tt(&spec).unwrap());
        assert!(max_abs(&(k * kinv - DMatrix::identity(8, 8))) < 1e-10);

        let single = LatticeKernelSpec::new(vec![LatticeAxis { min: 0.0, max: 1.0, bits: 3 }], 0.4).unwrap();
        assert_eq!(multi_kernel_tt(&single).unwrap(), kernel_tt(&single, 0).unwrap());
    }

    #[test]
    fn inverse_through_tt_algebra_at_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20;
        let a = 0.97;
        let v = TensorTrain::random(&vec![2; n], &vec![2; n - 1], &mut rng).unwrap();
        let k = kernel_tt_decay(n, a).unwrap();
        let kinv = kernel_inv_tt_decay(n, a).unwrap();
        let w = kinv.apply(&k.apply(&v).unwrap()).unwrap();
        let scale = v.norm() / ((1u64 << n) as f64).sqrt();
        for _ in 0..200 {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let (x, y) = (w.eval(&idx).unwrap(), v.eval(&idx).unwrap());
            assert!((x - y).abs() <= 1e-8 * scale.max(y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn cross_kernel_direct_formula() {
        // points {0, 1, 2, 3}, L = 1 in feature units
        let ax = LatticeAxis { min: 0.0, max: 3.0, bits: 2 };
        let spec = LatticeKernelSpec::new(vec![ax], 1.0 / 3.0).unwrap();
        let v = cross_kernel_vector_tt(&spec, &[1.5]).unwrap().to_dense();
        let want = [(-1.5f64).exp(), (-0.5f64).exp(), (-0.5f64).exp(), (-1.5f64).exp()];
        for (x, y) in v.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(matches!(cross_kernel_vector_tt(&spec, &[3.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn cross_kernel_on_grid_is_kernel_row() {
        let a = 0.8;
        let k = toeplitz(16, a);
        for g in 0..16 {
            let v = cross_kernel_tt_decay(4, a, g as f64).unwrap();
            assert!(v.bond_ranks().iter().all(|&r| r <= 3));
            for (i, x) in v.to_dense().iter().enumerate() {
                assert!((x - k[(g, i)]).abs() < 1e-14, "g={g} i={i}");
            }
        }
    }

    #[test]
    fn cross_kernel_random_two_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let axes = vec![
            LatticeAxis { min: 1.0, max: 4.0, bits: 3 },
            LatticeAxis { min: -1.0, max: 1.0, bits: 3 },
        ];
        let spec = LatticeKernelSpec::new(axes.clone(), 0.3).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = axes.iter().map(|ax| rng.random_range(ax.min..=ax.max)).collect();
            let v = cross_kernel_vector_tt(&spec, &x).unwrap();
            assert!(v.bond_ranks().iter().all(|&r| r <= 3));
            for (flat, got) in v.to_dense().iter().enumerate() {
                let (i0, i1) = (flat / 8, flat % 8);
                let d: f64 = [i0, i1]
                    .iter()
                    .zip(&axes)
                    .zip(&x)
                    .map(|((&i, ax), &xv)| (ax.normalize(xv) - i as f64 / 7.0).abs())
                    .sum();
                assert!((got - (-d / 0.3).exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_kernel_deep_lattice_is_finite() {
        let v = cross_kernel_tt_decay(30, 0.999_999, 123_456.7).unwrap();
        for c in v.cores() {
            assert!(c.data().iter().all(|x| x.is_finite() && x.abs() <= 1.0));
        }
    }

    #[test]
    fn gp_mean_interpolates_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let axes = vec![
            LatticeAxis { min: 0.0, max: 1.0, bits: 2 },
            LatticeAxis { min: 10.0, max: 20.0, bits: 3 },
        ];
        let spec = LatticeKernelSpec::new(axes, 0.5).unwrap();
        let y = TensorTrain::random(&spec.core_dims(), &[2, 2, 2, 2], &mut rng).unwrap();
        let gp = StnGpr::fit(&y, spec).unwrap();
        for i0 in 0..4 {
            for i1 in 0..8 {
                let x = [i0 as f64 / 3.0, 10.0 + 10.0 * i1 as f64 / 7.0];
                let idx = [(i0 >> 1) & 1, i0 & 1, (i1 >> 2) & 1, (i1 >> 1) & 1, i1 & 1];
                let want = y.eval(&idx).unwrap();
                assert!((gp.predict(&x).unwrap() - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn two_points_give_sinh_bridge() {
        let (x0, x1, l) = (0.0, 1.0, 0.7);
        let (y0, y1) = (2.0, -1.0);
        let spec = LatticeKernelSpec::new(vec![LatticeAxis { min: x0, max: x1, bits: 1 }], l).unwrap();
        let y = TensorTrain::from_factors(&[vec![y0, y1]]).unwrap();
        for xs in [0.1, 0.5, 0.83] {
            let want = (y0 * ((x1 - xs) / l).sinh() + y1 * ((xs - x0) / l).sinh()) / ((x1 - x0) / l).sinh();
            assert!((stn_gpr_mean(&y, &spec, &[xs]).unwrap() - want).abs() < 1e-12);
        }
    }
}
