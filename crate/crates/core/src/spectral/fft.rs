//! Thread-local FFT plan cache.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Unnormalized forward DFT in place.
pub(crate) fn forward(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// Unnormalized inverse DFT in place.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}
