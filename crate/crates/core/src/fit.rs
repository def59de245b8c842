//! Least-squares fits between change-points.

use crate::error::{Error, Result};
use crate::types::{SignalClass, TimeSeries};

/// Checks that `points` are strictly increasing inside `[1, len - 1]`.
pub(crate) fn check_change_points(points: &[usize], len: usize) -> Result<()> {
    let inside = points.iter().all(|&b| b >= 1 && b < len);
    if inside && points.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(Error::BadChangePoints {
            points: points.to_vec(),
            max: len.saturating_sub(1),
        })
    }
}

/// Least-squares fit of `series` with change-points at `change_points`.
///
/// Level shifts are fitted by segment means. Kinks are fitted by the
/// continuous linear spline with knots at the change-points, i.e. the span
/// of `1, t, (t - b_k)_+`. The spline is solved in the hat-function basis on
/// the nodes `1, b_1, ..., b_j, T`, whose normal equations are tridiagonal.
pub fn segment_fit(
    series: &TimeSeries,
    change_points: &[usize],
    class: SignalClass,
) -> Result<Vec<f64>> {
    let len = series.len();
    check_change_points(change_points, len)?;
    match class {
        SignalClass::PiecewiseConstant => Ok(piecewise_means(series.values(), change_points)),
        SignalClass::ContinuousPiecewiseLinear => linear_spline(series.values(), change_points),
    }
}

fn piecewise_means(x: &[f64], change_points: &[usize]) -> Vec<f64> {
    let mut fitted = Vec::with_capacity(x.len());
    let mut start = 0;
    for end in change_points
        .iter()
        .copied()
        .chain(std::iter::once(x.len()))
    {
        let seg = &x[start..end];
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        fitted.extend(std::iter::repeat_n(mean, seg.len()));
        start = end;
    }
    fitted
}

fn linear_spline(x: &[f64], change_points: &[usize]) -> Result<Vec<f64>> {
    let len = x.len();
    if len == 1 {
        return Ok(x.to_vec());
    }
    let mut nodes = Vec::with_capacity(change_points.len() + 2);
    nodes.push(1);
    nodes.extend_from_slice(change_points);
    nodes.push(len);
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::SingularFit {
            knots: change_points.to_vec(),
        });
    }

    let m = nodes.len();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    let mut rhs = vec![0.0; m];
    for k in 0..m - 1 {
        let (a, z) = (nodes[k], nodes[k + 1]);
        let width = (z - a) as f64;
        // Points a..z-1 belong to piece k; the final point T closes the last piece.
        let stop = if k + 2 == m { z } else { z - 1 };
        for t in a..=stop {
            let w = (t - a) as f64 / width;
            let (u, v) = (1.0 - w, w);
            let xt = x[t - 1];
            diag[k] += u * u;
            diag[k + 1] += v * v;
            off[k] += u * v;
            rhs[k] += u * xt;
            rhs[k + 1] += v * xt;
        }
    }
    let coef = solve_tridiagonal(&diag, &off, rhs).ok_or_else(|| Error::SingularFit {
        knots: change_points.to_vec(),
    })?;

    let mut fitted = Vec::with_capacity(len);
    for k in 0..m - 1 {
        let (a, z) = (nodes[k], nodes[k + 1]);
        let width = (z - a) as f64;
        let stop = if k + 2 == m { z } else { z - 1 };
        for t in a..=stop {
            let w = (t - a) as f64 / width;
            fitted.push(coef[k] * (1.0 - w) + coef[k + 1] * w);
        }
    }
    Ok(fitted)
}

/// Thomas algorithm for a symmetric tridiagonal system.
fn solve_tridiagonal(diag: &[f64], off: &[f64], mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.is_nan() || pivot <= 0.0 {
        return None;
    }
    for i in 1..n {
        c[i - 1] = off[i - 1] / pivot;
        rhs[i - 1] /= pivot;
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if pivot.is_nan() || pivot <= 1e-12 * diag[i] {
            return None;
        }
        rhs[i] -= off[i - 1] * rhs[i - 1];
    }
    rhs[n - 1] /= pivot;
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Some(rhs)
}

/// Residual sum of squares of `fitted` against `series`.
pub fn rss(series: &TimeSeries, fitted: &[f64]) -> f64 {
    series
        .values()
        .iter()
        .zip(fitted)
        .map(|(x, f)| (x - f) * (x - f))
        .sum()
}
