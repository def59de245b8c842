//! Contrast functions for both signal classes.
//!
//! Production evaluation goes through [`PrefixTables`], which makes every
//! contrast query O(1). The explicit contrast vectors are provided as well;
//! they are used by the tests and the naive oracle.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::types::{SignalClass, TimeSeries};

/// Running sums `cum_x[k] = sum_{t<=k} X_t` and `cum_tx[k] = sum_{t<=k} t X_t`.
///
/// Both tables have length `T + 1` with a leading zero. Accumulation is
/// compensated (Neumaier) so that long series keep full precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixTables {
    cum_x: Vec<f64>,
    cum_tx: Vec<f64>,
}

fn compensated_prefix(values: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(0.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

impl PrefixTables {
    pub fn new(series: &TimeSeries) -> Self {
        let x = series.values();
        let cum_x = compensated_prefix(x.iter().copied(), x.len());
        let cum_tx = compensated_prefix(
            x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v),
            x.len(),
        );
        Self { cum_x, cum_tx }
    }

    pub fn len(&self) -> usize {
        self.cum_x.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cum_x(&self) -> &[f64] {
        &self.cum_x
    }

    pub fn cum_tx(&self) -> &[f64] {
        &self.cum_tx
    }

    /// `sum_{t=a}^{z} X_t`, zero when `a > z`.
    #[inline]
    pub fn sum_x(&self, a: usize, z: usize) -> f64 {
        if a > z {
            return 0.0;
        }
        self.cum_x[z] - self.cum_x[a - 1]
    }

    /// `sum_{t=a}^{z} (t - c) X_t`, zero when `a > z`.
    #[inline]
    pub fn sum_centered_tx(&self, a: usize, z: usize, c: usize) -> f64 {
        if a > z {
            return 0.0;
        }
        (self.cum_tx[z] - self.cum_tx[a - 1]) - c as f64 * (self.cum_x[z] - self.cum_x[a - 1])
    }
}

fn check_triple(s: usize, e: usize, b: usize, len: usize) -> Result<()> {
    if s >= 1 && s <= b && b < e && e <= len {
        Ok(())
    } else {
        Err(Error::IndexOrder { s, b, e, len })
    }
}

fn check_linear_triple(s: usize, e: usize, b: usize, len: usize) -> Result<()> {
    check_triple(s, e, b, len)?;
    if b == s {
        return Err(Error::DegenerateSpan { s, b, e });
    }
    Ok(())
}

/// Signed CUSUM statistic from prefix sums; assumes `s <= b < e`.
#[inline]
fn cusum_unchecked(tables: &PrefixTables, s: usize, e: usize, b: usize) -> f64 {
    let n_left = (b - s + 1) as f64;
    let n_right = (e - b) as f64;
    let n = (e - s + 1) as f64;
    let left = tables.sum_x(s, b);
    let right = tables.sum_x(b + 1, e);
    (n_right * left - n_left * right) / (n * n_left * n_right).sqrt()
}

/// Normalizing constants of the linear-kink contrast vector.
#[inline]
fn linear_constants(s: usize, e: usize, b: usize) -> (f64, f64) {
    let n = (e - s + 1) as f64;
    let (l1, l0) = ((b - s + 1) as f64, (b - s) as f64);
    let (r1, r0) = ((e - b + 1) as f64, (e - b) as f64);
    let alpha = (6.0 / (n * (n * n - 1.0) * (1.0 + r1 * l1 + r0 * l0))).sqrt();
    let beta = ((r1 * r0) / (l1 * l0)).sqrt();
    (alpha, beta)
}

/// Signed inner product with the linear-kink contrast vector; assumes `s < b < e`.
#[inline]
fn linear_unchecked(tables: &PrefixTables, s: usize, e: usize, b: usize) -> f64 {
    let (alpha, beta) = linear_constants(s, e, b);
    let slope_left = (e + 2 * b + 2 - 3 * s) as f64;
    let slope_right = (3 * e + 2 - 2 * b - s) as f64;
    let span = (e - s) as f64;
    // The affine weights are re-centred at s (left) and e (right) so that the
    // large offsets cancel in integer arithmetic instead of in floating point.
    let left =
        slope_left * tables.sum_centered_tx(s, b, s) - (b - s) as f64 * span * tables.sum_x(s, b);
    let right = slope_right * tables.sum_centered_tx(b + 1, e, e)
        + (e - b) as f64 * span * tables.sum_x(b + 1, e);
    alpha * beta * left - alpha / beta * right
}

/// Class-specific contrast evaluator over one series.
#[derive(Debug, Clone)]
pub struct ContrastKernel {
    class: SignalClass,
    tables: PrefixTables,
}

impl ContrastKernel {
    pub fn new(class: SignalClass, series: &TimeSeries) -> Self {
        Self {
            class,
            tables: PrefixTables::new(series),
        }
    }

    pub fn class(&self) -> SignalClass {
        self.class
    }

    pub fn tables(&self) -> &PrefixTables {
        &self.tables
    }

    /// Length of the underlying series.
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn min_span(&self) -> usize {
        self.class.min_span()
    }

    /// Admissible `b` for the interval `[s, e]` (possibly empty).
    pub fn candidates(&self, s: usize, e: usize) -> RangeInclusive<usize> {
        match self.class {
            SignalClass::PiecewiseConstant => s..=e.saturating_sub(1),
            SignalClass::ContinuousPiecewiseLinear => s + 1..=e.saturating_sub(1),
        }
    }

    /// Whether `(s, e, b)` is a valid query for this kernel.
    pub fn admits(&self, s: usize, e: usize, b: usize) -> bool {
        s >= 1 && e <= self.len() && self.candidates(s, e).contains(&b)
    }

    /// Signed statistic whose absolute value is the contrast.
    pub fn signed(&self, s: usize, e: usize, b: usize) -> Result<f64> {
        let len = self.len();
        match self.class {
            SignalClass::PiecewiseConstant => {
                check_triple(s, e, b, len)?;
                Ok(cusum_unchecked(&self.tables, s, e, b))
            }
            SignalClass::ContinuousPiecewiseLinear => {
                check_linear_triple(s, e, b, len)?;
                Ok(linear_unchecked(&self.tables, s, e, b))
            }
        }
    }

    /// Contrast value `C_{s,e}^b(X) >= 0`.
    pub fn contrast(&self, s: usize, e: usize, b: usize) -> Result<f64> {
        self.signed(s, e, b).map(f64::abs)
    }

    /// Contrast, or zero when the triple is not admissible.
    #[inline]
    pub fn contrast_or_zero(&self, s: usize, e: usize, b: usize) -> f64 {
        if !self.admits(s, e, b) {
            return 0.0;
        }
        match self.class {
            SignalClass::PiecewiseConstant => cusum_unchecked(&self.tables, s, e, b).abs(),
            SignalClass::ContinuousPiecewiseLinear => linear_unchecked(&self.tables, s, e, b).abs(),
        }
    }

    /// Location and value of the largest contrast on `[s, e]`; ties go to
    /// the smallest `b`.
    pub fn argmax(&self, s: usize, e: usize) -> Result<(usize, f64)> {
        if s < 1 || e > self.len() || e < s + self.min_span() {
            return Err(Error::SpanTooShort {
                s,
                e,
                min_span: self.min_span(),
            });
        }
        let mut best = (0usize, f64::NEG_INFINITY);
        match self.class {
            SignalClass::PiecewiseConstant => {
                let t = &self.tables;
                let base = t.cum_x[s - 1];
                let total = t.cum_x[e] - base;
                let n = (e - s + 1) as f64;
                for b in s..e {
                    let n_left = (b - s + 1) as f64;
                    let n_right = n - n_left;
                    let left = t.cum_x[b] - base;
                    let v = ((n_right * left - n_left * (total - left))
                        / (n * n_left * n_right).sqrt())
                    .abs();
                    if v > best.1 {
                        best = (b, v);
                    }
                }
            }
            SignalClass::ContinuousPiecewiseLinear => {
                for b in s + 1..e {
                    let v = linear_unchecked(&self.tables, s, e, b).abs();
                    if v > best.1 {
                        best = (b, v);
                    }
                }
            }
        }
        Ok(best)
    }
}

/// Signed CUSUM statistic `X~_{s,e}^b`. Builds prefix tables on each call;
/// use [`ContrastKernel`] for repeated queries.
pub fn cusum(series: &TimeSeries, s: usize, e: usize, b: usize) -> Result<f64> {
    check_triple(s, e, b, series.len())?;
    Ok(cusum_unchecked(&PrefixTables::new(series), s, e, b))
}

/// Contrast `|<X, phi_{s,e}^b>|` for a kink at `b`, via prefix sums.
pub fn cplm_contrast(series: &TimeSeries, s: usize, e: usize, b: usize) -> Result<f64> {
    check_linear_triple(s, e, b, series.len())?;
    Ok(linear_unchecked(&PrefixTables::new(series), s, e, b).abs())
}

/// The kink contrast vector `phi_{s,e}^b` of length `len`, zero outside `[s, e]`.
pub fn cplm_contrast_vector(s: usize, e: usize, b: usize, len: usize) -> Result<Vec<f64>> {
    check_linear_triple(s, e, b, len)?;
    let (alpha, beta) = linear_constants(s, e, b);
    let (sf, ef, bf) = (s as f64, e as f64, b as f64);
    let mut phi = vec![0.0; len];
    for t in s..=e {
        let tf = t as f64;
        phi[t - 1] = if t <= b {
            alpha
                * beta
                * ((ef + 2.0 * bf - 3.0 * sf + 2.0) * tf
                    - (bf * ef + bf * sf - 2.0 * sf * sf + 2.0 * sf))
        } else {
            -alpha / beta
                * ((3.0 * ef - 2.0 * bf - sf + 2.0) * tf
                    - (2.0 * ef * ef + 2.0 * ef - bf * ef - bf * sf))
        };
    }
    Ok(phi)
}

/// Unit-norm centred linear vector `gamma_{s,e}` and constant vector
/// `1_{s,e}`, both of length `len` and zero outside `[s, e]`.
pub fn helper_vectors(s: usize, e: usize, len: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(s >= 1 && s < e && e <= len) {
        return Err(Error::IndexOrder { s, b: s, e, len });
    }
    let (sf, ef) = (s as f64, e as f64);
    let n = ef - sf + 1.0;
    let gamma_scale = (n / 12.0 * (ef * ef - 2.0 * ef * sf + 2.0 * ef + sf * sf - 2.0 * sf))
        .sqrt()
        .recip();
    let mid = (ef + sf) / 2.0;
    let mut gamma = vec![0.0; len];
    let mut ones = vec![0.0; len];
    for t in s..=e {
        gamma[t - 1] = gamma_scale * (t as f64 - mid);
        ones[t - 1] = n.sqrt().recip();
    }
    Ok((gamma, ones))
}

/// Maximizer of the kernel's contrast on `[s, e]`.
pub fn argmax_contrast(kernel: &ContrastKernel, s: usize, e: usize) -> Result<(usize, f64)> {
    kernel.argmax(s, e)
}
