//! TT-cross: builds a tensor train from a black-box function by sampling
//! it only on superblocks `I_k x n_k x J_{k+1}` picked by maxvol.
//!
//! A forward pass fixes the right index sets and grows nested left sets one
//! bond at a time; the backward pass does the mirror image, reusing the left
//! sets it inherits. Each directional pass counts as one sweep.

mod maxvol;
mod pricer;

pub use maxvol::{matrix_cross, maxvol, MaxvolResult};
pub use pricer::{BlackBoxPricer, BudgetedPricer, FnPricer, TtPricer};

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tt::{sorted_svd, Core, TensorTrain};

/// Nested multi-index sets maintained by the sweeps.
///
/// `left[k]` holds tuples `(i_0, ..., i_{k-1})` and `right[k]` holds tuples
/// `(j_k, ..., j_{d-1})`; bond `k` sits between cores `k - 1` and `k`.
/// `left[0]` and `right[d]` contain the single empty tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSets {
    pub left: Vec<Vec<Vec<usize>>>,
    pub right: Vec<Vec<Vec<usize>>>,
}

impl IndexSets {
    pub fn num_cores(&self) -> usize {
        self.left.len().saturating_sub(1)
    }

    /// Every left tuple at bond `k + 1` extends one at bond `k`, and every
    /// right tuple at bond `k` extends one at bond `k + 1`.
    pub fn is_nested(&self) -> bool {
        let d = self.num_cores();
        let left_ok = (1..=d).all(|k| {
            self.left[k]
                .iter()
                .all(|t| t.len() == k && self.left[k - 1].iter().any(|p| p[..] == t[..k - 1]))
        });
        let right_ok = (0..d).all(|k| {
            self.right[k].iter().all(|t| {
                t.len() == d - k && self.right[k + 1].iter().any(|s| s[..] == t[1..])
            })
        });
        left_ok && right_ok
    }

    fn validate(&self, shape: &[usize]) -> Result<()> {
        let d = shape.len();
        if self.left.len() != d + 1 || self.right.len() != d + 1 {
            return Err(Error::Dimension(format!(
                "index sets sized for {} cores, pricer has {d}",
                self.num_cores()
            )));
        }
        if self.left[0] != vec![Vec::<usize>::new()] || self.right[d] != vec![Vec::<usize>::new()] {
            return Err(Error::Dimension("boundary index sets must hold the empty tuple".into()));
        }
        for (k, set) in self.right.iter().enumerate().skip(1).take(d.saturating_sub(1)) {
            if set.is_empty() {
                return Err(Error::Dimension(format!("right index set at bond {k} is empty")));
            }
            for t in set {
                if t.len() != d - k || t.iter().zip(&shape[k..]).any(|(&j, &n)| j >= n) {
                    return Err(Error::Dimension(format!(
                        "right tuple {t:?} at bond {k} does not fit shape {shape:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Largest rank each interior bond can carry given the grid, clipped to
/// `caps`.
pub fn feasible_ranks(shape: &[usize], caps: &[usize]) -> Vec<usize> {
    let d = shape.len();
    (1..d)
        .map(|k| {
            let left = shape[..k].iter().fold(1usize, |a, &n| a.saturating_mul(n));
            let right = shape[k..].iter().fold(1usize, |a, &n| a.saturating_mul(n));
            caps[k - 1].min(left).min(right)
        })
        .collect()
}

/// Random nested right index sets with per-bond size
/// `min(rank, prod of dims left of the bond, prod of dims right of it)`;
/// left sets beyond the boundary start empty.
pub fn init_index_sets(shape: &[usize], rank: usize, seed: u64) -> Result<IndexSets> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::Dimension(format!("cannot index grid of shape {shape:?}")));
    }
    if rank == 0 {
        return Err(Error::Dimension("rank must be at least 1".into()));
    }
    let d = shape.len();
    let ranks = feasible_ranks(shape, &vec![rank; d - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut right = vec![Vec::new(); d + 1];
    right[d] = vec![Vec::new()];
    for k in (1..d).rev() {
        let below = &right[k + 1];
        let pool = shape[k] * below.len();
        let want = ranks[k - 1];
        debug_assert!(want <= pool);
        let mut picks = sample(&mut rng, pool, want).into_vec();
        picks.sort_unstable();
        right[k] = picks
            .into_iter()
            .map(|p| {
                let (j, b) = (p / below.len(), p % below.len());
                std::iter::once(j).chain(below[b].iter().copied()).collect()
            })
            .collect();
    }
    let mut left = vec![Vec::new(); d + 1];
    left[0] = vec![Vec::new()];
    Ok(IndexSets { left, right })
}

/// Upper bound on the pricer calls [`tt_cross`] makes with `opts`,
/// validation sample included. Cache hits make the real count smaller.
pub fn max_cross_evals(shape: &[usize], opts: &CrossOptions) -> u64 {
    let d = shape.len();
    let mut r = vec![1u64];
    r.extend(feasible_ranks(shape, &opts.rank_caps).iter().map(|&v| v as u64));
    r.push(1);
    let n: Vec<u64> = shape.iter().map(|&v| v as u64).collect();
    let one = |k: usize| r[k] * n[k] * r[k + 1];
    let pass = if d == 1 {
        return n[0] + opts.validation_samples as u64;
    } else {
        match opts.variant {
            CrossVariant::OneSite => (0..d).map(one).sum::<u64>(),
            CrossVariant::TwoSite => (0..d - 1).map(|k| r[k] * n[k] * n[k + 1] * r[k + 2]).sum::<u64>() + one(0).max(one(d - 1)),
        }
    };
    pass * opts.sweeps as u64 + opts.validation_samples as u64
}

/// Settings for [`tt_cross`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossOptions {
    /// Rank cap for each of the `d - 1` interior bonds.
    pub rank_caps: Vec<usize>,
    /// Directional passes to run at most (forward, backward, forward, ...).
    pub sweeps: usize,
    /// Stop once the validation error changes by less than this between
    /// passes.
    pub tol: f64,
    pub maxvol_tol: f64,
    pub maxvol_max_iter: usize,
    /// Size of the held-out random sample; 0 disables validation.
    pub validation_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub variant: CrossVariant,
    /// Return the pass with the lowest validation error rather than the
    /// last one. Needs a validation sample.
    #[serde(default)]
    pub keep_best: bool,
}

/// How each bond picks its new index set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossVariant {
    /// Maxvol on the `(r n) x r` unfolding of a one-core superblock.
    #[default]
    OneSite,
    /// Samples two neighbouring cores at once, truncates the `(r n) x (n r)`
    /// block by SVD and runs maxvol on the leading singular vectors. Twice
    /// the samples per step, but the bond subspace is chosen from fresh data
    /// instead of the previous sets, and ranks shrink where the block is
    /// numerically rank deficient.
    TwoSite,
}

impl CrossOptions {
    pub fn uniform(num_cores: usize, rank: usize, sweeps: usize) -> Self {
        Self {
            rank_caps: vec![rank; num_cores.saturating_sub(1)],
            sweeps,
            tol: 0.0,
            maxvol_tol: 0.01,
            maxvol_max_iter: 100,
            validation_samples: 256,
            seed: 0,
            variant: CrossVariant::OneSite,
            keep_best: false,
        }
    }

    pub fn with_keep_best(mut self, keep_best: bool) -> Self {
        self.keep_best = keep_best;
        self
    }

    pub fn with_variant(mut self, variant: CrossVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_validation(mut self, samples: usize) -> Self {
        self.validation_samples = samples;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Diagnostics of a cross run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    #[serde(rename = "sweeps")]
    pub sweeps_run: usize,
    /// Interior bond ranks of the result.
    pub ranks: Vec<usize>,
    /// Pricer calls made by the run, validation sample included.
    #[serde(rename = "evals")]
    pub evals_used: u64,
    /// Calls spent on superblocks alone.
    pub cross_evals: u64,
    pub validation_evals: u64,
    /// Relative error on the held-out sample of the returned train.
    pub validation_error: Option<f64>,
    /// Pass (1-based) whose train was returned.
    #[serde(default)]
    pub selected_pass: usize,
    pub validation_history: Vec<f64>,
    /// Largest superblock sampled, in entries.
    pub max_superblock: usize,
    /// Most superblock entries held in memory at once.
    pub peak_stored_entries: usize,
    /// Passes where maxvol hit its iteration cap.
    pub maxvol_warnings: usize,
    /// Whether the tolerance rule ended the run early.
    pub converged: bool,
}

/// Recently sampled superblocks; lookups avoid re-pricing the intersection
/// entries shared by neighbouring steps.
struct SampleCache {
    blocks: Vec<HashMap<Vec<usize>, f64>>,
    keep: usize,
    peak: usize,
}

impl SampleCache {
    fn new(keep: usize) -> Self {
        Self {
            blocks: Vec::new(),
            keep,
            peak: 0,
        }
    }

    fn get(&self, idx: &[usize]) -> Option<f64> {
        self.blocks.iter().rev().find_map(|b| b.get(idx).copied())
    }

    fn push(&mut self, block: HashMap<Vec<usize>, f64>) {
        self.blocks.push(block);
        if self.blocks.len() > self.keep {
            self.blocks.remove(0);
        }
        let stored = self.blocks.iter().map(HashMap::len).sum();
        self.peak = self.peak.max(stored);
    }
}

struct Sweeper<'a, P: ?Sized> {
    pricer: &'a P,
    shape: Vec<usize>,
    sets: IndexSets,
    cores: Vec<Option<Core>>,
    cache: SampleCache,
    cross_evals: u64,
    max_superblock: usize,
    maxvol_tol: f64,
    maxvol_max_iter: usize,
    maxvol_warnings: usize,
    rank_caps: Vec<usize>,
}

/// Singular values below this fraction of the largest are dropped by the
/// two-site variant.
const TWO_SITE_RANK_TOL: f64 = 1e-12;

impl<P: BlackBoxPricer + ?Sized> Sweeper<'_, P> {
    /// Values `f(left[k][a], i, right[k+1][b])` as a core of shape
    /// `(|left[k]|, n_k, |right[k+1]|)`.
    fn superblock(&mut self, k: usize) -> Result<Core> {
        let (ra, m, rb, data) = self.sample(k, 1)?;
        Core::new(ra, m, rb, data)
    }

    /// Values on `left[k] x (n_k ... n_{k+width-1}) x right[k+width]`,
    /// row-major with the middle cores most significant first.
    fn sample(&mut self, k: usize, width: usize) -> Result<(usize, usize, usize, Vec<f64>)> {
        let mids = &self.shape[k..k + width];
        let m: usize = mids.iter().product();
        let lefts = &self.sets.left[k];
        let rights = &self.sets.right[k + width];
        let (ra, rb) = (lefts.len(), rights.len());
        self.max_superblock = self.max_superblock.max(ra * m * rb);

        let mut block = HashMap::with_capacity(ra * m * rb);
        let mut missing = Vec::new();
        let mut indices = Vec::with_capacity(ra * m * rb);
        for l in lefts {
            for mut i in 0..m {
                let mut mid = vec![0; width];
                for (slot, &n) in mid.iter_mut().zip(mids).rev() {
                    *slot = i % n;
                    i /= n;
                }
                for r in rights {
                    let mut idx = Vec::with_capacity(self.shape.len());
                    idx.extend_from_slice(l);
                    idx.extend_from_slice(&mid);
                    idx.extend_from_slice(r);
                    match self.cache.get(&idx) {
                        Some(v) => {
                            block.insert(idx.clone(), v);
                        }
                        None => missing.push(idx.clone()),
                    }
                    indices.push(idx);
                }
            }
        }
        missing.sort();
        missing.dedup();
        if !missing.is_empty() {
            let values = self.pricer.eval_batch(&missing)?;
            self.cross_evals += missing.len() as u64;
            for (idx, v) in missing.into_iter().zip(values) {
                block.insert(idx, v);
            }
        }
        let data = indices.iter().map(|idx| block[idx]).collect();
        self.cache.push(block);
        Ok((ra, m, rb, data))
    }

    fn forward(&mut self) -> Result<()> {
        let d = self.shape.len();
        for k in 0..d - 1 {
            let n = self.shape[k];
            let block = self.superblock(k)?;
            let c = block_left(&block);
            let (rows, interp) = self.skeleton(&c, k + 1)?;
            let lefts = &self.sets.left[k];
            self.sets.left[k + 1] = rows
                .iter()
                .map(|&p| {
                    let mut t = lefts[p / n].clone();
                    t.push(p % n);
                    t
                })
                .collect();
            self.cores[k] = Some(Core::new(block.left(), n, block.right(), row_major(&interp))?);
        }
        self.cores[d - 1] = Some(self.superblock(d - 1)?);
        Ok(())
    }

    fn backward(&mut self) -> Result<()> {
        let d = self.shape.len();
        for k in (1..d).rev() {
            let n = self.shape[k];
            let block = self.superblock(k)?;
            let (ra, rb) = (block.left(), block.right());
            // (n * rb) x ra: rows indexed by (i, b)
            let c = DMatrix::from_fn(n * rb, ra, |p, a| block.get(a, p / rb, p % rb));
            let (cols, interp) = self.skeleton(&c, k)?;
            let rights = &self.sets.right[k + 1];
            self.sets.right[k] = cols
                .iter()
                .map(|&p| std::iter::once(p / rb).chain(rights[p % rb].iter().copied()).collect())
                .collect();
            let core = Core::from_fn(ra, n, rb, |a, i, b| interp[(i * rb + b, a)]);
            self.cores[k] = Some(core);
        }
        self.cores[0] = Some(self.superblock(0)?);
        Ok(())
    }

    /// Leading left singular vectors of the two-site block at cores
    /// `(k, k + 1)` as a `(ra n_k) x r` matrix, or the right ones as
    /// `(n_{k+1} rb) x r` when `right` is set.
    fn two_site_basis(&mut self, k: usize, right: bool) -> Result<DMatrix<f64>> {
        let (ra, m, rb, data) = self.sample(k, 2)?;
        let (n0, n1) = (self.shape[k], self.shape[k + 1]);
        debug_assert_eq!(m, n0 * n1);
        let block = DMatrix::from_row_slice(ra * n0, n1 * rb, &data);
        let (u, s, vt) = sorted_svd(&block);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(self.abort(k + 1));
        }
        let top = s.first().copied().unwrap_or(0.0);
        let numeric = s.iter().take_while(|&&v| v > TWO_SITE_RANK_TOL * top).count().max(1);
        let r = numeric.min(self.rank_caps[k]);
        Ok(if right {
            vt.rows(0, r).transpose()
        } else {
            u.columns(0, r).into_owned()
        })
    }

    fn forward_two_site(&mut self) -> Result<()> {
        let d = self.shape.len();
        for k in 0..d - 1 {
            let n = self.shape[k];
            let ra = self.sets.left[k].len();
            let basis = self.two_site_basis(k, false)?;
            let (rows, interp) = self.interpolate(&basis, k + 1)?;
            let lefts = &self.sets.left[k];
            self.sets.left[k + 1] = rows
                .iter()
                .map(|&p| {
                    let mut t = lefts[p / n].clone();
                    t.push(p % n);
                    t
                })
                .collect();
            self.cores[k] = Some(Core::new(ra, n, rows.len(), row_major(&interp))?);
        }
        self.cores[d - 1] = Some(self.superblock(d - 1)?);
        Ok(())
    }

    fn backward_two_site(&mut self) -> Result<()> {
        let d = self.shape.len();
        for k in (1..d).rev() {
            let n = self.shape[k];
            let rb = self.sets.right[k + 1].len();
            let basis = self.two_site_basis(k - 1, true)?;
            let (cols, interp) = self.interpolate(&basis, k)?;
            let rights = &self.sets.right[k + 1];
            self.sets.right[k] = cols
                .iter()
                .map(|&p| std::iter::once(p / rb).chain(rights[p % rb].iter().copied()).collect())
                .collect();
            let core = Core::from_fn(cols.len(), n, rb, |a, i, b| interp[(i * rb + b, a)]);
            self.cores[k] = Some(core);
        }
        self.cores[0] = Some(self.superblock(0)?);
        Ok(())
    }

    /// Maxvol rows of the orthogonal factor of `c` and the interpolating
    /// factor `Q Q[rows]^{-1}` (which equals `C C[rows]^{-1}` when `c` has
    /// full column rank).
    fn skeleton(&mut self, c: &DMatrix<f64>, bond: usize) -> Result<(Vec<usize>, DMatrix<f64>)> {
        let q = c.clone().col_piv_qr().q();
        let q = if q.ncols() > c.ncols() {
            q.columns(0, c.ncols()).into_owned()
        } else {
            q
        };
        self.interpolate(&q, bond)
    }

    /// Maxvol rows of the full-column-rank `q` and `Q Q[rows]^{-1}`.
    fn interpolate(&mut self, q: &DMatrix<f64>, bond: usize) -> Result<(Vec<usize>, DMatrix<f64>)> {
        let res = maxvol(q, self.maxvol_tol, self.maxvol_max_iter).map_err(|e| match e {
            Error::SingularPivot { .. } => Error::SingularPivot { bond: Some(bond) },
            other => other,
        })?;
        if !res.converged {
            self.maxvol_warnings += 1;
        }
        let sub = q.select_rows(&res.rows);
        // X Q_I = Q  <=>  Q_I^T X^T = Q^T
        let xt = maxvol::solve_with_jitter(&sub.transpose(), &q.transpose())
            .ok_or_else(|| self.abort(bond))?;
        Ok((res.rows, xt.transpose()))
    }

    fn abort(&self, bond: usize) -> Error {
        Error::CrossAborted {
            bond,
            partial: Box::new(self.partial()),
        }
    }

    fn partial(&self) -> TensorTrain {
        let d = self.shape.len();
        let rank = |k: usize| {
            if k == 0 || k == d {
                1
            } else {
                self.sets.right[k].len()
            }
        };
        let cores = (0..d)
            .map(|k| match &self.cores[k] {
                Some(c) if c.left() == rank(k) && c.right() == rank(k + 1) => c.clone(),
                _ => Core::zeros(rank(k), self.shape[k], rank(k + 1)),
            })
            .collect();
        TensorTrain::new(cores).unwrap_or_else(|_| {
            TensorTrain::zeros(&self.shape).expect("non-empty shape")
        })
    }

    fn assemble(&self) -> Result<TensorTrain> {
        TensorTrain::new(
            self.cores
                .iter()
                .map(|c| c.clone().expect("every core built by a completed pass"))
                .collect(),
        )
    }
}

fn block_left(block: &Core) -> DMatrix<f64> {
    DMatrix::from_row_slice(block.left() * block.size(), block.right(), block.data())
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|(r, c)| m[(r, c)])
        .collect()
}

/// TT-cross approximation of `pricer` on its full grid.
///
/// Runs up to `opts.sweeps` directional passes starting forward from
/// `init`, stopping early once the held-out validation error changes by
/// less than `opts.tol`. The full tensor is never materialized.
pub fn tt_cross<P: BlackBoxPricer + ?Sized>(
    pricer: &P,
    init: IndexSets,
    opts: &CrossOptions,
) -> Result<(TensorTrain, CrossReport)> {
    let (tt, report, _) = tt_cross_with_sets(pricer, init, opts)?;
    Ok((tt, report))
}

/// [`tt_cross`] that also returns the final index sets.
pub fn tt_cross_with_sets<P: BlackBoxPricer + ?Sized>(
    pricer: &P,
    init: IndexSets,
    opts: &CrossOptions,
) -> Result<(TensorTrain, CrossReport, IndexSets)> {
    let shape = pricer.shape().to_vec();
    let d = shape.len();
    init.validate(&shape)?;
    if opts.rank_caps.len() + 1 != d {
        return Err(Error::Dimension(format!(
            "{} rank caps for {d} cores",
            opts.rank_caps.len()
        )));
    }
    for k in 1..d {
        if init.right[k].len() > opts.rank_caps[k - 1] {
            return Err(Error::Dimension(format!(
                "initial right set at bond {k} has {} tuples, cap is {}",
                init.right[k].len(),
                opts.rank_caps[k - 1]
            )));
        }
    }
    if opts.sweeps == 0 {
        return Err(Error::Dimension("at least one sweep is required".into()));
    }
    let start_count = pricer.eval_count();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_0fc0_ffee);
    let validation: Vec<Vec<usize>> = (0..opts.validation_samples)
        .map(|_| shape.iter().map(|&n| rng.random_range(0..n)).collect())
        .collect();
    let truth = if validation.is_empty() {
        Vec::new()
    } else {
        pricer.eval_batch(&validation)?
    };
    let truth_norm = truth.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut sw = Sweeper {
        pricer,
        shape: shape.clone(),
        sets: init,
        cores: vec![None; d],
        cache: SampleCache::new(3),
        cross_evals: 0,
        max_superblock: 0,
        maxvol_tol: opts.maxvol_tol,
        maxvol_max_iter: opts.maxvol_max_iter,
        maxvol_warnings: 0,
        rank_caps: opts.rank_caps.clone(),
    };

    let mut history = Vec::new();
    let mut converged = false;
    let mut sweeps_run = 0;
    let mut tt = None;
    let mut best: Option<(f64, usize, TensorTrain)> = None;
    for pass in 0..opts.sweeps {
        if d == 1 {
            sw.cores[0] = Some(sw.superblock(0)?);
        } else {
            match (opts.variant, pass % 2 == 0) {
                (CrossVariant::OneSite, true) => sw.forward()?,
                (CrossVariant::OneSite, false) => sw.backward()?,
                (CrossVariant::TwoSite, true) => sw.forward_two_site()?,
                (CrossVariant::TwoSite, false) => sw.backward_two_site()?,
            }
        }
        sweeps_run += 1;
        let current = sw.assemble()?;
        if !validation.is_empty() {
            let err = validation
                .iter()
                .zip(&truth)
                .map(|(idx, &t)| (current.eval_unchecked(idx) - t).powi(2))
                .sum::<f64>()
                .sqrt()
                / truth_norm.max(f64::MIN_POSITIVE);
            log::debug!("cross pass {sweeps_run}: validation error {err:.3e}");
            let stop = history
                .last()
                .is_some_and(|&prev: &f64| (prev - err).abs() < opts.tol);
            history.push(err);
            if opts.keep_best && best.as_ref().is_none_or(|(e, _, _)| err < *e) {
                best = Some((err, sweeps_run, current.clone()));
            }
            if stop {
                converged = true;
                tt = Some(current);
                break;
            }
        }
        tt = Some(current);
        if d == 1 {
            break;
        }
    }
    let (tt, selected_pass, validation_error) = match best {
        Some((err, pass, best_tt)) => (best_tt, pass, Some(err)),
        None => (tt.expect("at least one pass ran"), sweeps_run, history.last().copied()),
    };

    let report = CrossReport {
        sweeps_run,
        ranks: tt.bond_ranks(),
        evals_used: pricer.eval_count() - start_count,
        cross_evals: sw.cross_evals,
        validation_evals: truth.len() as u64,
        validation_error,
        selected_pass,
        validation_history: history,
        max_superblock: sw.max_superblock,
        peak_stored_entries: sw.cache.peak,
        maxvol_warnings: sw.maxvol_warnings,
        converged,
    };
    Ok((tt, report, sw.sets))
}
