//! Noise-scale estimation and block averaging for heavy-tailed noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{SignalClass, TimeSeries};

/// `Phi^{-1}(3/4)`, the MAD of a standard normal.
const MAD_NORMAL: f64 = 0.674_489_750_196_081_7;

/// Block-averaging bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleTransform {
    pub scale: usize,
    /// Number of blocks, `ceil(T / scale)`.
    pub n_blocks: usize,
    pub original_len: usize,
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (_, &mut upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

fn mad(mut values: Vec<f64>) -> f64 {
    let center = median(&mut values);
    let mut dev: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    median(&mut dev) / MAD_NORMAL
}

/// Robust noise standard deviation from differenced data.
///
/// First differences are used for level shifts (`/ sqrt 2`), second
/// differences for kinks (`/ sqrt 6`); both remove the signal away from the
/// change-points.
pub fn estimate_sigma_mad(series: &TimeSeries, class: SignalClass) -> Result<f64> {
    let x = series.values();
    if x.len() < 3 {
        return Err(Error::TooShortForScale { len: x.len() });
    }
    let estimate = match class {
        SignalClass::PiecewiseConstant => {
            mad(x.windows(2).map(|w| w[1] - w[0]).collect()) / std::f64::consts::SQRT_2
        }
        SignalClass::ContinuousPiecewiseLinear => {
            mad(x.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect()) / 6f64.sqrt()
        }
    };
    if estimate > 0.0 && estimate.is_finite() {
        Ok(estimate)
    } else {
        Err(Error::ZeroScale)
    }
}

/// Averages consecutive blocks of `scale` observations; a shorter final
/// block is averaged over its actual length.
pub fn block_average(series: &TimeSeries, scale: usize) -> Result<(TimeSeries, ScaleTransform)> {
    let len = series.len();
    if scale == 0 || scale > len {
        return Err(Error::BadScale { scale, len });
    }
    let averaged: Vec<f64> = series
        .values()
        .chunks(scale)
        .map(|block| block.iter().sum::<f64>() / block.len() as f64)
        .collect();
    let transform = ScaleTransform {
        scale,
        n_blocks: averaged.len(),
        original_len: len,
    };
    Ok((TimeSeries::new(averaged)?, transform))
}

/// Maps locations on the averaged scale back to the original series:
/// `(r - 1) * scale + floor(scale / 2 + 0.5)`, clamped to
/// `[1, original_len - 1]` and deduplicated.
pub fn map_locations(locations: &[usize], scale: usize, original_len: usize) -> Vec<usize> {
    let hi = original_len.saturating_sub(1).max(1);
    // floor(scale / 2 + 0.5) == ceil(scale / 2) for integers
    let offset = scale.div_ceil(2);
    let mut out: Vec<usize> = locations
        .iter()
        .map(|&r| (r.saturating_sub(1) * scale + offset).clamp(1, hi))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Expansion step on the averaged scale, `max(1, floor(lambda / scale))`.
pub fn adapt_lambda(lambda: usize, scale: usize) -> usize {
    (lambda / scale.max(1)).max(1)
}
