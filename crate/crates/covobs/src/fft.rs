//! Thin wrapper over rustfft with a per-thread plan cache.
//!
//! rustfft computes unnormalized DFTs; every caller here goes through
//! [`forward`] / [`inverse`], where `inverse` folds in the `1/n` factor so the
//! pair is an identity.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

#[derive(Default)]
struct PlanCache {
    planner: Option<FftPlanner<f64>>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl PlanCache {
    fn forward(&mut self, n: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.forward
            .entry(n)
            .or_insert_with(|| planner.plan_fft_forward(n))
            .clone()
    }

    fn inverse(&mut self, n: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.inverse
            .entry(n)
            .or_insert_with(|| planner.plan_fft_inverse(n))
            .clone()
    }
}

/// In-place unnormalized DFT, sign convention `sum_j x_j e^{-2pi i jk/n}`.
pub fn forward(buf: &mut [Complex64]) {
    let plan = PLANS.with(|c| c.borrow_mut().forward(buf.len()));
    plan.process(buf);
}

/// In-place inverse DFT including the `1/n` normalization.
pub fn inverse(buf: &mut [Complex64]) {
    let plan = PLANS.with(|c| c.borrow_mut().inverse(buf.len()));
    plan.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}
