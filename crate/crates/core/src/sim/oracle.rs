//! Slow, independent reference implementations for testing.

use crate::error::{Error, Result};
use crate::types::{SignalClass, TimeSeries};

/// Contrast of `b` on `[s, e]` computed from scratch: explicit segment sums
/// for level shifts, and for kinks the projection onto `(t - b)_+` after
/// removing its constant and linear parts on `[s, e]`.
pub fn oracle_contrast(
    series: &TimeSeries,
    class: SignalClass,
    s: usize,
    e: usize,
    b: usize,
) -> f64 {
    let x = &series.values()[s - 1..e];
    match class {
        SignalClass::PiecewiseConstant => {
            let split = b - s + 1;
            let (left, right) = x.split_at(split);
            let (nl, nr) = (left.len() as f64, right.len() as f64);
            let n = nl + nr;
            let mean_l = left.iter().sum::<f64>() / nl;
            let mean_r = right.iter().sum::<f64>() / nr;
            ((nl * nr / n).sqrt() * (mean_l - mean_r)).abs()
        }
        SignalClass::ContinuousPiecewiseLinear => {
            let n = x.len();
            let ts: Vec<f64> = (s..=e).map(|t| t as f64).collect();
            let mut v: Vec<f64> = ts.iter().map(|&t| (t - b as f64).max(0.0)).collect();
            // Least-squares line fit to v, subtracted.
            let mt = ts.iter().sum::<f64>() / n as f64;
            let mv = v.iter().sum::<f64>() / n as f64;
            let stt: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
            let stv: f64 = ts.iter().zip(&v).map(|(t, w)| (t - mt) * (w - mv)).sum();
            let slope = stv / stt;
            for (w, t) in v.iter_mut().zip(&ts) {
                *w -= mv + slope * (t - mt);
            }
            let norm = v.iter().map(|w| w * w).sum::<f64>().sqrt();
            (v.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() / norm).abs()
        }
    }
}

/// Exhaustive maximizer of [`oracle_contrast`] over admissible `b`; ties go
/// to the smallest `b`.
pub fn oracle_argmax(
    series: &TimeSeries,
    class: SignalClass,
    s: usize,
    e: usize,
) -> Result<(usize, f64)> {
    let min_span = class.min_span();
    if s < 1 || e > series.len() || e < s + min_span {
        return Err(Error::SpanTooShort { s, e, min_span });
    }
    let first = match class {
        SignalClass::PiecewiseConstant => s,
        SignalClass::ContinuousPiecewiseLinear => s + 1,
    };
    let mut best = (first, f64::NEG_INFINITY);
    for b in first..e {
        let v = oracle_contrast(series, class, s, e, b);
        if v > best.1 {
            best = (b, v);
        }
    }
    Ok(best)
}

/// Least-squares optimal placement of exactly `k` level shifts, by dynamic
/// programming over segment costs. Meant for short series only.
#[allow(clippy::needless_range_loop)]
pub fn oracle_optimal_segmentation(series: &TimeSeries, k: usize) -> Result<Vec<usize>> {
    let x = series.values();
    let len = x.len();
    if k >= len {
        return Err(Error::Infeasible { k, len });
    }
    // cost[i][j]: squared error of x[i..j] around its mean (0-based, half-open).
    let mut cost = vec![vec![0.0; len + 1]; len + 1];
    for i in 0..len {
        let (mut sum, mut sq) = (0.0, 0.0);
        for j in i + 1..=len {
            sum += x[j - 1];
            sq += x[j - 1] * x[j - 1];
            cost[i][j] = sq - sum * sum / (j - i) as f64;
        }
    }
    // best[m][j]: minimal cost of x[..j] split into m + 1 segments.
    let mut best = vec![vec![f64::INFINITY; len + 1]; k + 1];
    let mut arg = vec![vec![0usize; len + 1]; k + 1];
    for j in 1..=len {
        best[0][j] = cost[0][j];
    }
    for m in 1..=k {
        for j in m + 1..=len {
            for i in m..j {
                let c = best[m - 1][i] + cost[i][j];
                if c < best[m][j] {
                    best[m][j] = c;
                    arg[m][j] = i;
                }
            }
        }
    }
    let mut cps = Vec::with_capacity(k);
    let mut j = len;
    for m in (1..=k).rev() {
        j = arg[m][j];
        cps.push(j);
    }
    cps.reverse();
    Ok(cps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn argmax_examples() {
        let c = ts(vec![3.0; 12]);
        assert_eq!(
            oracle_argmax(&c, SignalClass::PiecewiseConstant, 1, 12).unwrap(),
            (1, 0.0)
        );
        let step = ts((1..=12).map(|t| if t <= 7 { 0.0 } else { 2.0 }).collect());
        assert_eq!(
            oracle_argmax(&step, SignalClass::PiecewiseConstant, 1, 12)
                .unwrap()
                .0,
            7
        );
        assert!(oracle_argmax(&step, SignalClass::ContinuousPiecewiseLinear, 3, 4).is_err());
    }

    #[test]
    fn segmentation_examples() {
        let step = ts((1..=30).map(|t| if t <= 12 { 0.0 } else { 1.0 }).collect());
        assert_eq!(oracle_optimal_segmentation(&step, 1).unwrap(), vec![12]);
        assert_eq!(
            oracle_optimal_segmentation(&step, 0).unwrap(),
            Vec::<usize>::new()
        );
        let m2 =
            crate::sim::models::generate_signal(&crate::sim::models::model_spec("M2").unwrap());
        let prefix = ts(m2[..40].to_vec());
        assert_eq!(
            oracle_optimal_segmentation(&prefix, 3).unwrap(),
            vec![11, 21, 31]
        );
        assert!(matches!(
            oracle_optimal_segmentation(&step, 30),
            Err(Error::Infeasible { .. })
        ));
    }
}
