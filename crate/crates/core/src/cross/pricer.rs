use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tt::TensorTrain;

/// A function sampled on a product grid, seen only through batched
/// evaluation.
///
/// Implementations must be deterministic per multi-index (stochastic
/// pricers fix their seed per index) and safe to call concurrently.
pub trait BlackBoxPricer: Sync {
    /// Physical dimension of every tensor index.
    fn shape(&self) -> &[usize];

    /// Values at a batch of multi-indices, in order.
    fn eval_batch(&self, batch: &[Vec<usize>]) -> Result<Vec<f64>>;

    /// Cumulative number of function calls served. Monotone.
    fn eval_count(&self) -> u64;

    /// Cumulative wall-clock nanoseconds spent inside `eval_batch`.
    fn eval_nanos(&self) -> u64 {
        0
    }
}

/// Wraps a closure over multi-indices. Batches are evaluated in parallel and
/// non-finite values are reported as pricer failures.
pub struct FnPricer<F> {
    shape: Vec<usize>,
    f: F,
    count: AtomicU64,
    nanos: AtomicU64,
}

impl<F> FnPricer<F>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    pub fn new(shape: Vec<usize>, f: F) -> Self {
        Self {
            shape,
            f,
            count: AtomicU64::new(0),
            nanos: AtomicU64::new(0),
        }
    }
}

impl<F> BlackBoxPricer for FnPricer<F>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn eval_batch(&self, batch: &[Vec<usize>]) -> Result<Vec<f64>> {
        for idx in batch {
            crate::tt::check_index(&self.shape, idx)?;
        }
        let start = Instant::now();
        let values: Vec<f64> = batch.par_iter().map(|idx| (self.f)(idx)).collect();
        self.nanos
            .fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        self.count.fetch_add(batch.len() as u64, Ordering::Relaxed);
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Pricer {
                index: batch[p].clone(),
                message: format!("non-finite value {}", values[p]),
            });
        }
        Ok(values)
    }

    fn eval_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn eval_nanos(&self) -> u64 {
        self.nanos.load(Ordering::Relaxed)
    }
}

/// A tensor train used as a black box.
pub struct TtPricer {
    tt: TensorTrain,
    shape: Vec<usize>,
    count: AtomicU64,
}

impl TtPricer {
    pub fn new(tt: TensorTrain) -> Self {
        let shape = tt.dims();
        Self {
            tt,
            shape,
            count: AtomicU64::new(0),
        }
    }

    pub fn train(&self) -> &TensorTrain {
        &self.tt
    }
}

impl BlackBoxPricer for TtPricer {
    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn eval_batch(&self, batch: &[Vec<usize>]) -> Result<Vec<f64>> {
        let values = batch.iter().map(|idx| self.tt.eval(idx)).collect::<Result<Vec<_>>>()?;
        self.count.fetch_add(batch.len() as u64, Ordering::Relaxed);
        Ok(values)
    }

    fn eval_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Refuses to serve more than `budget` calls in total.
pub struct BudgetedPricer<'a, P: ?Sized> {
    inner: &'a P,
    budget: u64,
    served: AtomicU64,
}

impl<'a, P: BlackBoxPricer + ?Sized> BudgetedPricer<'a, P> {
    pub fn new(inner: &'a P, budget: u64) -> Self {
        Self {
            inner,
            budget,
            served: AtomicU64::new(0),
        }
    }
}

impl<P: BlackBoxPricer + ?Sized> BlackBoxPricer for BudgetedPricer<'_, P> {
    fn shape(&self) -> &[usize] {
        self.inner.shape()
    }

    fn eval_batch(&self, batch: &[Vec<usize>]) -> Result<Vec<f64>> {
        let before = self.served.fetch_add(batch.len() as u64, Ordering::Relaxed);
        if before + batch.len() as u64 > self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        self.inner.eval_batch(batch)
    }

    fn eval_count(&self) -> u64 {
        self.inner.eval_count()
    }

    fn eval_nanos(&self) -> u64 {
        self.inner.eval_nanos()
    }
}
