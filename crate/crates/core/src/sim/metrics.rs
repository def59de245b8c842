//! Accuracy measures for estimated change-points and fits.

use crate::error::{Error, Result};

/// Mean squared error between a fit and the true signal.
pub fn mse(fitted: &[f64], truth: &[f64]) -> Result<f64> {
    if fitted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: fitted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = fitted
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / truth.len() as f64)
}

/// Length of the longest true segment, with boundaries 0 and `len`.
pub fn longest_segment(true_cps: &[usize], len: usize) -> usize {
    let mut prev = 0;
    let mut longest = 0;
    for &c in true_cps.iter().chain(std::iter::once(&len)) {
        longest = longest.max(c - prev);
        prev = c;
    }
    longest
}

fn directed(from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .map(|&a| to.iter().map(|&b| a.abs_diff(b)).min().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Hausdorff distance between the two sets divided by the longest true
/// segment. `None` when exactly one of the sets is empty.
pub fn hausdorff_scaled(true_cps: &[usize], est_cps: &[usize], len: usize) -> Option<f64> {
    match (true_cps.is_empty(), est_cps.is_empty()) {
        (true, true) => Some(0.0),
        (true, false) | (false, true) => None,
        (false, false) => {
            let d = directed(true_cps, est_cps).max(directed(est_cps, true_cps));
            Some(d as f64 / longest_segment(true_cps, len) as f64)
        }
    }
}
