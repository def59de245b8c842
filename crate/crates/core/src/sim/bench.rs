//! Monte-Carlo benchmark runner.
//!
//! Replications are independent: [`run_replication`] can be mapped over
//! replication indices in any order (or in parallel) and the outcomes
//! combined with [`aggregate`]. [`bench_run`] does both sequentially.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pipeline::detect;
use crate::sim::metrics::{hausdorff_scaled, mse};
use crate::sim::models::{generate_signal, ModelSpec};
use crate::sim::noise::{add_noise, replication_seed, NoiseDist};
use crate::types::{default_config, DetectorConfig, SignalClass, StoppingRule};

/// A labelled detector configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPipeline {
    pub label: String,
    pub config: DetectorConfig,
}

impl BenchPipeline {
    /// Default detector for `class` with the given stopping rule and
    /// block-averaging scale.
    pub fn standard(class: SignalClass, stopping: StoppingRule, scale: usize) -> Self {
        let config = DetectorConfig {
            stopping,
            ht_scale: scale,
            ..default_config(class)
        };
        let label = if scale > 1 {
            format!("{stopping}-s{scale}")
        } else {
            stopping.to_string()
        };
        Self { label, config }
    }
}

/// Inclusive range of `N_hat - N`; `None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Bin {
    pub fn contains(&self, d: i64) -> bool {
        self.lo.is_none_or(|lo| d >= lo) && self.hi.is_none_or(|hi| d <= hi)
    }

    pub fn label(&self) -> String {
        match (self.lo, self.hi) {
            (None, None) => "any".into(),
            (None, Some(hi)) => format!("<={hi}"),
            (Some(lo), None) => format!(">={lo}"),
            (Some(lo), Some(hi)) if lo == hi => format!("{lo}"),
            (Some(lo), Some(hi)) => format!("[{lo},{hi}]"),
        }
    }
}

/// Histogram bins of `N_hat - N`: coarse bands for signals with hundreds of
/// change-points, single values around zero otherwise.
pub fn bins_for(spec: &ModelSpec) -> Vec<Bin> {
    let b = |lo, hi| Bin { lo, hi };
    if spec.true_cps.len() >= 200 {
        vec![
            b(None, Some(-50)),
            b(Some(-49), Some(-11)),
            b(Some(-10), Some(10)),
            b(Some(11), Some(49)),
            b(Some(50), None),
        ]
    } else {
        vec![
            b(None, Some(-3)),
            b(Some(-2), Some(-2)),
            b(Some(-1), Some(-1)),
            b(Some(0), Some(0)),
            b(Some(1), Some(1)),
            b(Some(2), Some(2)),
            b(Some(3), None),
        ]
    }
}

/// Result of one pipeline on one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepOutcome {
    pub rep: u64,
    pub pipeline: usize,
    pub n_diff: i64,
    pub mse: f64,
    pub hausdorff: Option<f64>,
    pub seconds: f64,
}

/// Aggregated results of one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub pipeline: String,
    pub counts: Vec<usize>,
    pub mean_mse: f64,
    /// Mean over replications where the distance is defined.
    pub mean_hausdorff: Option<f64>,
    pub mean_seconds: f64,
    pub total_seconds: f64,
    /// `N_hat - N` per replication, in replication order.
    pub n_diffs: Vec<i64>,
}

impl BenchRow {
    /// Replications with `N_hat - N` in `[lo, hi]`.
    pub fn count_within(&self, lo: i64, hi: i64) -> usize {
        self.n_diffs.iter().filter(|&&d| d >= lo && d <= hi).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub model: String,
    pub dist: NoiseDist,
    pub reps: usize,
    pub seed: u64,
    pub bins: Vec<Bin>,
    pub rows: Vec<BenchRow>,
}

/// Generates replication `rep` of `spec` and runs every pipeline on it.
pub fn run_replication(
    spec: &ModelSpec,
    signal: &[f64],
    rep: u64,
    dist: NoiseDist,
    seed: u64,
    pipelines: &[BenchPipeline],
) -> Result<Vec<RepOutcome>> {
    let series = add_noise(signal, spec.sigma, dist, replication_seed(seed, rep))?;
    pipelines
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let start = Instant::now();
            let res = detect(&series, &p.config)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(RepOutcome {
                rep,
                pipeline: idx,
                n_diff: res.change_points.len() as i64 - spec.true_cps.len() as i64,
                mse: mse(&res.fitted, signal)?,
                hausdorff: hausdorff_scaled(&spec.true_cps, &res.change_points, spec.len),
                seconds,
            })
        })
        .collect()
}

/// Combines per-replication outcomes into a report. The order of
/// `outcomes` does not matter.
pub fn aggregate(
    spec: &ModelSpec,
    dist: NoiseDist,
    seed: u64,
    pipelines: &[BenchPipeline],
    mut outcomes: Vec<RepOutcome>,
) -> BenchReport {
    outcomes.sort_by_key(|o| (o.pipeline, o.rep));
    let bins = bins_for(spec);
    let rows = pipelines
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mine: Vec<&RepOutcome> = outcomes.iter().filter(|o| o.pipeline == idx).collect();
            let n = mine.len().max(1) as f64;
            let counts = bins
                .iter()
                .map(|b| mine.iter().filter(|o| b.contains(o.n_diff)).count())
                .collect();
            let defined: Vec<f64> = mine.iter().filter_map(|o| o.hausdorff).collect();
            let total_seconds: f64 = mine.iter().map(|o| o.seconds).sum();
            BenchRow {
                pipeline: p.label.clone(),
                counts,
                mean_mse: mine.iter().map(|o| o.mse).sum::<f64>() / n,
                mean_hausdorff: (!defined.is_empty())
                    .then(|| defined.iter().sum::<f64>() / defined.len() as f64),
                mean_seconds: total_seconds / n,
                total_seconds,
                n_diffs: mine.iter().map(|o| o.n_diff).collect(),
            }
        })
        .collect();
    let reps = outcomes
        .iter()
        .map(|o| o.rep)
        .max()
        .map_or(0, |m| m as usize + 1);
    BenchReport {
        model: spec.name.clone(),
        dist,
        reps,
        seed,
        bins,
        rows,
    }
}

/// Runs `reps` seeded replications of `spec` through every pipeline.
pub fn bench_run(
    spec: &ModelSpec,
    reps: usize,
    dist: NoiseDist,
    seed: u64,
    pipelines: &[BenchPipeline],
) -> Result<BenchReport> {
    let signal = generate_signal(spec);
    let mut outcomes = Vec::with_capacity(reps * pipelines.len());
    for rep in 0..reps as u64 {
        outcomes.extend(run_replication(spec, &signal, rep, dist, seed, pipelines)?);
    }
    Ok(aggregate(spec, dist, seed, pipelines, outcomes))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

impl BenchReport {
    fn header(&self, timing: bool) -> Vec<String> {
        let mut h = vec![
            "model".into(),
            "pipeline".into(),
            "dist".into(),
            "reps".into(),
        ];
        h.extend(self.bins.iter().map(Bin::label));
        h.extend(["mse".into(), "d_h".into()]);
        if timing {
            h.push("time_s".into());
        }
        h
    }

    fn cells(&self, timing: bool) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![
                    self.model.clone(),
                    r.pipeline.clone(),
                    self.dist.to_string(),
                    self.reps.to_string(),
                ];
                c.extend(r.counts.iter().map(usize::to_string));
                c.push(format!("{:.5}", r.mean_mse));
                c.push(fmt_opt(r.mean_hausdorff));
                if timing {
                    c.push(format!("{:.4}", r.mean_seconds));
                }
                c
            })
            .collect()
    }

    /// CSV with a header row. Without `timing` the output is deterministic.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = self.header(timing).join(",");
        out.push('\n');
        for row in self.cells(timing) {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Right-aligned plain-text table.
    pub fn to_table(&self, timing: bool) -> String {
        let header = self.header(timing);
        let body = self.cells(timing);
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                body.iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&body) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::models::model_spec;

    #[test]
    fn bins_cover_every_difference() {
        for name in ["M2", "M5"] {
            let bins = bins_for(&model_spec(name).unwrap());
            for d in -3000..3000 {
                assert_eq!(
                    bins.iter().filter(|b| b.contains(d)).count(),
                    1,
                    "{name} {d}"
                );
            }
        }
    }

    #[test]
    fn single_rep_is_deterministic() {
        let spec = model_spec("M2").unwrap();
        let p = [BenchPipeline::standard(
            SignalClass::PiecewiseConstant,
            StoppingRule::Hybrid,
            1,
        )];
        let a = bench_run(&spec, 1, NoiseDist::Gaussian, 9, &p).unwrap();
        let b = bench_run(&spec, 1, NoiseDist::Gaussian, 9, &p).unwrap();
        assert_eq!(a.to_csv(false), b.to_csv(false));
        assert_eq!(a.rows[0].counts.iter().sum::<usize>(), 1);
        assert_eq!(a.reps, 1);
        assert!(a.to_table(true).lines().count() == 2);
    }
}
