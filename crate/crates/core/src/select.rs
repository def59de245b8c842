//! Over-detection, the solution path, strengthened-SIC model choice and the
//! hybrid stopping rule.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::contrast::{ContrastKernel, PrefixTables};
use crate::detect::{
    bounded_contrast, detect_windowed, left_boundary, threshold_value, ScanParams, WindowPolicy,
};
use crate::error::Result;
use crate::fit::{check_change_points, rss, segment_fit};
use crate::prune::neighbor_prune;
use crate::types::{
    ChangePointEstimate, DetectionResult, DetectorConfig, PathMode, SignalClass, SolutionPath,
    StoppingRule, TimeSeries,
};

/// Tunables of the solution-path construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    /// Exponent of `(ln T)^alpha` in the distance gates and the penalty.
    pub alpha: f64,
    /// Distance scale of the pruning gates.
    pub cstar: f64,
    /// Contrast floor constant; the floor is `ctilde2 * sqrt(ln T) * sigma`.
    pub ctilde2: f64,
    pub mode: PathMode,
}

impl From<&DetectorConfig> for PathConfig {
    fn from(config: &DetectorConfig) -> Self {
        Self {
            alpha: config.sic_alpha,
            cstar: config.path_cstar,
            ctilde2: config.path_contrast_floor,
            mode: config.path_mode,
        }
    }
}

/// Threshold scan of `kernel` at `lambda` with threshold constant `constant`,
/// windowed according to `config`.
pub(crate) fn threshold_scan(
    kernel: &ContrastKernel,
    config: &DetectorConfig,
    lambda: usize,
    constant: f64,
    sigma: f64,
) -> Result<Vec<ChangePointEstimate>> {
    let params = ScanParams {
        lambda,
        zeta: sigma * threshold_value(kernel.len(), constant),
        restart: config.restart_mode,
    };
    let policy = WindowPolicy {
        window_len: config.window_len,
        trigger: config.window_trigger,
    };
    detect_windowed(kernel, &params, &policy)
}

/// Deliberately generous detection with the lower path constant, at the
/// configured `lambda`. Returns the sorted estimates.
pub fn overdetect(
    kernel: &ContrastKernel,
    config: &DetectorConfig,
    sigma: f64,
) -> Result<Vec<ChangePointEstimate>> {
    threshold_scan(
        kernel,
        config,
        config.lambda,
        config.path_threshold_const,
        sigma,
    )
}

/// Contrast of `points[idx]` on the segment bounded by its neighbours in
/// `points` (or the series ends). Zero when that segment is too short.
pub fn neighbor_contrast(kernel: &ContrastKernel, points: &[usize], idx: usize) -> f64 {
    let prev = if idx == 0 {
        left_boundary(kernel.class())
    } else {
        points[idx - 1]
    };
    let next = points.get(idx + 1).copied().unwrap_or(kernel.len());
    bounded_contrast(kernel, prev, points[idx], next)
}

/// Index of the smallest value; ties go to the smaller index, which is also
/// the smaller location since `points` is sorted.
fn argmin(values: &[f64]) -> Option<usize> {
    (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
}

fn all_neighbor_contrasts(kernel: &ContrastKernel, points: &[usize]) -> Vec<f64> {
    (0..points.len())
        .map(|i| neighbor_contrast(kernel, points, i))
        .collect()
}

/// Removes, while possible, the weakest estimate whose neighbour contrast is
/// at most `floor` and which passes `gate(points, idx)`.
fn prune_below_floor<G>(
    kernel: &ContrastKernel,
    points: &mut Vec<usize>,
    removed: &mut Vec<usize>,
    floor: f64,
    gate: G,
) where
    G: Fn(&[usize], usize) -> bool,
{
    while let Some(m) = argmin(&all_neighbor_contrasts(kernel, points)) {
        if neighbor_contrast(kernel, points, m) > floor || !gate(points, m) {
            break;
        }
        removed.push(points.remove(m));
    }
}

/// Pruning gates applied before the final greedy removal. Returns the
/// removals in order and leaves the survivors in `points`.
fn gated_pruning(
    kernel: &ContrastKernel,
    points: &mut Vec<usize>,
    pcfg: &PathConfig,
    sigma: f64,
) -> Vec<usize> {
    let len = kernel.len();
    let log_t = (len as f64).ln();
    let floor = pcfg.ctilde2 * log_t.sqrt() * sigma;
    let reach = pcfg.cstar * log_t.powf(pcfg.alpha);
    let mut removed = Vec::new();

    // Weak estimates crowded between close neighbours.
    prune_below_floor(kernel, points, &mut removed, floor, |p, m| {
        let prev = if m == 0 { 1 } else { p[m - 1] };
        let next = p.get(m + 1).copied().unwrap_or(len);
        (next - prev) as f64 <= 2.0 * reach
    });

    // Estimates too close to their left neighbour, then weak ones.
    while let Some(j) = (1..points.len()).find(|&j| ((points[j] - points[j - 1]) as f64) <= reach) {
        removed.push(points.remove(j));
    }
    prune_below_floor(kernel, points, &mut removed, floor, |_, _| true);

    // Contrasts on midpoint-bounded intervals.
    loop {
        let values: Vec<f64> = (0..points.len())
            .map(|j| {
                let prev = if j == 0 { 1 } else { points[j - 1] };
                let next = points.get(j + 1).copied().unwrap_or(len);
                let s = (prev + points[j]) / 2 + 1;
                let e = (points[j] + next).div_ceil(2);
                kernel.contrast_or_zero(s, e, points[j])
            })
            .collect();
        match argmin(&values) {
            Some(m) if values[m] <= floor => removed.push(points.remove(m)),
            _ => break,
        }
    }
    removed
}

/// Orders the over-detected `points` from most to least important.
///
/// The estimate with the smallest neighbour contrast is removed repeatedly
/// until none is left; the path is the reversed removal order. In
/// [`PathMode::FullParts1to4`] the distance- and floor-gated pruning stages
/// run first and their removals count as the earliest ones. `sigma` scales
/// the contrast floor of those stages.
pub fn solution_path(
    kernel: &ContrastKernel,
    points: &[usize],
    pcfg: &PathConfig,
    sigma: f64,
) -> SolutionPath {
    let mut points: Vec<usize> = points.to_vec();
    points.sort_unstable();
    points.dedup();
    let mut removed = match pcfg.mode {
        PathMode::FastPart4Only => Vec::new(),
        PathMode::FullParts1to4 => gated_pruning(kernel, &mut points, pcfg, sigma),
    };
    let outcome = neighbor_prune(
        &points,
        left_boundary(kernel.class()),
        kernel.len(),
        |p, b, n| bounded_contrast(kernel, p, b, n),
        None,
    );
    removed.extend(outcome.removed);
    removed.reverse();
    SolutionPath {
        ordered_removals: removed,
    }
}

/// Strengthened-SIC value of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsicScore {
    pub j: usize,
    /// `(T/2) ln sigma_j^2 + n_j (ln T)^alpha`; minus infinity (`null` in
    /// JSON) when the fit is exact.
    pub ssic: f64,
    pub n_params: usize,
    /// The residual variance vanished and the score is a sentinel.
    pub degenerate: bool,
}

/// A scored member of the nested model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredModel {
    pub j: usize,
    pub change_points: Vec<usize>,
    pub ssic: f64,
    pub n_params: usize,
    pub degenerate: bool,
}

fn mean_square(series: &TimeSeries) -> f64 {
    let x = series.values();
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

fn score_from_rss(
    series: &TimeSeries,
    j: usize,
    rss: f64,
    class: SignalClass,
    alpha: f64,
) -> SsicScore {
    let len = series.len() as f64;
    let variance = rss.max(0.0) / len;
    let n_params = class.n_params(j);
    // Anything this small relative to the data is round-off.
    let degenerate = variance <= 1e-20 * mean_square(series);
    let ssic = if degenerate {
        f64::NEG_INFINITY
    } else {
        len / 2.0 * variance.ln() + n_params as f64 * len.ln().powf(alpha)
    };
    SsicScore {
        j,
        ssic,
        n_params,
        degenerate,
    }
}

/// Strengthened SIC of the model with the given change-points, using the
/// Gaussian profile likelihood of the class-specific least-squares fit.
pub fn ssic_score(
    series: &TimeSeries,
    change_points: &[usize],
    class: SignalClass,
    alpha: f64,
) -> Result<SsicScore> {
    let fitted = segment_fit(series, change_points, class)?;
    Ok(score_from_rss(
        series,
        change_points.len(),
        rss(series, &fitted),
        class,
        alpha,
    ))
}

/// Scores `M_0, ..., M_J` of `path`.
///
/// For level shifts the residual sum of squares is updated incrementally:
/// splitting the segment `[s, e]` at `b` lowers it by the squared CUSUM
/// statistic of `b` on `[s, e]`.
pub fn score_path(
    series: &TimeSeries,
    path: &SolutionPath,
    class: SignalClass,
    alpha: f64,
) -> Result<Vec<SsicScore>> {
    let mut sorted = path.ordered_removals.clone();
    sorted.sort_unstable();
    check_change_points(&sorted, series.len())?;
    let mut scores = Vec::with_capacity(path.len() + 1);
    match class {
        SignalClass::PiecewiseConstant => {
            let tables = PrefixTables::new(series);
            let len = series.len();
            let base = rss(series, &segment_fit(series, &[], class)?);
            let mut current = base;
            let mut active = BTreeSet::new();
            scores.push(score_from_rss(series, 0, current, class, alpha));
            for (j, &b) in path.ordered_removals.iter().enumerate() {
                let s = active.range(..b).next_back().map_or(1, |&p| p + 1);
                let e = active.range(b + 1..).next().copied().unwrap_or(len);
                let (n, nl, nr) = ((e - s + 1) as f64, (b - s + 1) as f64, (e - b) as f64);
                let stat =
                    (nr * tables.sum_x(s, b) - nl * tables.sum_x(b + 1, e)) / (n * nl * nr).sqrt();
                current -= stat * stat;
                active.insert(b);
                if current <= 1e-8 * base {
                    // Too much cancellation to trust the running value.
                    let model: Vec<usize> = active.iter().copied().collect();
                    current = rss(series, &segment_fit(series, &model, class)?);
                }
                scores.push(score_from_rss(series, j + 1, current, class, alpha));
            }
        }
        SignalClass::ContinuousPiecewiseLinear => {
            for j in 0..=path.len() {
                scores.push(ssic_score(series, &path.model(j), class, alpha)?);
            }
        }
    }
    Ok(scores)
}

/// The model chosen from a solution path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelChoice {
    pub n_hat: usize,
    pub change_points: Vec<usize>,
    pub fitted: Vec<f64>,
    pub scores: Vec<SsicScore>,
}

impl ModelChoice {
    pub fn chosen(&self) -> ScoredModel {
        let s = self.scores[self.n_hat];
        ScoredModel {
            j: s.j,
            change_points: self.change_points.clone(),
            ssic: s.ssic,
            n_params: s.n_params,
            degenerate: s.degenerate,
        }
    }
}

/// Picks the model minimizing the strengthened SIC; ties go to the smaller `j`.
pub fn select_model(
    series: &TimeSeries,
    path: &SolutionPath,
    class: SignalClass,
    alpha: f64,
) -> Result<ModelChoice> {
    let scores = score_path(series, path, class, alpha)?;
    let mut n_hat = 0;
    for (j, s) in scores.iter().enumerate() {
        if s.ssic < scores[n_hat].ssic {
            n_hat = j;
        }
    }
    let change_points = path.model(n_hat);
    let fitted = segment_fit(series, &change_points, class)?;
    Ok(ModelChoice {
        n_hat,
        change_points,
        fitted,
        scores,
    })
}

/// Over-detection, solution path and strengthened-SIC choice at `lambda`.
pub(crate) fn sic_detect(
    series: &TimeSeries,
    kernel: &ContrastKernel,
    config: &DetectorConfig,
    lambda: usize,
    sigma: f64,
) -> Result<ModelChoice> {
    let stage = DetectorConfig {
        lambda,
        ..config.clone()
    };
    let points: Vec<usize> = overdetect(kernel, &stage, sigma)?
        .iter()
        .map(|e| e.location)
        .collect();
    let path = solution_path(kernel, &points, &PathConfig::from(config), sigma);
    select_model(series, &path, config.class, config.sic_alpha)
}

/// Threshold detection at `config.lambda`, accepted when it finds more than
/// `config.hybrid_jstar` change-points; otherwise the strengthened-SIC
/// pipeline at `config.hybrid_lambda`.
pub fn hybrid_detect(
    series: &TimeSeries,
    kernel: &ContrastKernel,
    config: &DetectorConfig,
    sigma: f64,
) -> Result<DetectionResult> {
    let first = threshold_scan(kernel, config, config.lambda, config.threshold_const, sigma)?;
    let (change_points, fitted, stopping_used) = if first.len() > config.hybrid_jstar {
        let cps: Vec<usize> = first.iter().map(|e| e.location).collect();
        let fitted = segment_fit(series, &cps, config.class)?;
        (cps, fitted, StoppingRule::Threshold)
    } else {
        let choice = sic_detect(series, kernel, config, config.hybrid_lambda, sigma)?;
        (choice.change_points, choice.fitted, StoppingRule::Sic)
    };
    Ok(DetectionResult {
        change_points,
        fitted,
        sigma_hat: sigma,
        config_echo: config.clone(),
        stopping_used,
    })
}
