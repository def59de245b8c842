//! End-to-end detection: noise scale, optional block averaging, the chosen
//! stopping rule and the final fit.

use serde::{Deserialize, Serialize};

use crate::contrast::ContrastKernel;
use crate::error::{Error, Result};
use crate::fit::segment_fit;
use crate::preprocess::{adapt_lambda, block_average, estimate_sigma_mad, map_locations};
use crate::select::{
    hybrid_detect, overdetect, score_path, sic_detect, solution_path, threshold_scan, PathConfig,
    SsicScore,
};
use crate::types::{
    DetectionResult, DetectorConfig, Sigma, SolutionPath, StoppingRule, TimeSeries,
};

/// Runs the detector described by `config` on `series`.
///
/// With `ht_scale > 1` the series is block-averaged first, both expansion
/// steps are divided by the scale, detection runs on the averaged series and
/// the locations are mapped back. A fixed `sigma` refers to the raw series
/// and is divided by `sqrt(ht_scale)` for the averaged one; `sigma_hat` in
/// the result is always the level on the series actually scanned.
pub fn detect(series: &TimeSeries, config: &DetectorConfig) -> Result<DetectionResult> {
    config.validate()?;
    let class = config.class;
    let scale = config.ht_scale;
    let averaged;
    let (work, stage_config) = if scale > 1 {
        averaged = block_average(series, scale)?.0;
        let adapted = DetectorConfig {
            lambda: adapt_lambda(config.lambda, scale),
            hybrid_lambda: adapt_lambda(config.hybrid_lambda, scale),
            ..config.clone()
        };
        (&averaged, adapted)
    } else {
        (series, config.clone())
    };

    let sigma = match config.sigma {
        Sigma::Fixed(v) => v / (scale as f64).sqrt(),
        Sigma::Auto => estimate_sigma_mad(work, class)?,
    };

    let kernel = ContrastKernel::new(class, work);
    let (change_points, stopping_used) = if work.len() < 2 {
        (Vec::new(), config.stopping)
    } else {
        match config.stopping {
            StoppingRule::Threshold => {
                let found = threshold_scan(
                    &kernel,
                    &stage_config,
                    stage_config.lambda,
                    config.threshold_const,
                    sigma,
                )?;
                (
                    found.iter().map(|e| e.location).collect(),
                    StoppingRule::Threshold,
                )
            }
            StoppingRule::Sic => {
                let choice = sic_detect(work, &kernel, &stage_config, stage_config.lambda, sigma)?;
                (choice.change_points, StoppingRule::Sic)
            }
            StoppingRule::Hybrid => {
                let res = hybrid_detect(work, &kernel, &stage_config, sigma)?;
                (res.change_points, res.stopping_used)
            }
        }
    };

    let change_points = if scale > 1 {
        map_locations(&change_points, scale, series.len())
    } else {
        change_points
    };
    let fitted = segment_fit(series, &change_points, class)?;
    Ok(DetectionResult {
        change_points,
        fitted,
        sigma_hat: sigma,
        config_echo: config.clone(),
        stopping_used,
    })
}

/// Solution path of a series together with the score of every nested model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub sigma_hat: f64,
    pub path: SolutionPath,
    /// `scores[j]` belongs to the model with `j` change-points.
    pub scores: Vec<SsicScore>,
    /// Size of the model with the smallest score.
    pub n_hat: usize,
}

/// Over-detects with `config.lambda` and `config.path_threshold_const`,
/// orders the estimates and scores every nested model. Block averaging is
/// not supported here because mapped locations can collide.
pub fn solution_path_report(series: &TimeSeries, config: &DetectorConfig) -> Result<PathReport> {
    config.validate()?;
    if config.ht_scale > 1 {
        return Err(Error::InvalidConfig(
            "the solution path needs ht_scale = 1".into(),
        ));
    }
    let sigma = match config.sigma {
        Sigma::Fixed(v) => v,
        Sigma::Auto => estimate_sigma_mad(series, config.class)?,
    };
    let path = if series.len() < 2 {
        SolutionPath::default()
    } else {
        let kernel = ContrastKernel::new(config.class, series);
        let points: Vec<usize> = overdetect(&kernel, config, sigma)?
            .iter()
            .map(|e| e.location)
            .collect();
        solution_path(&kernel, &points, &PathConfig::from(config), sigma)
    };
    let scores = score_path(series, &path, config.class, config.sic_alpha)?;
    let mut n_hat = 0;
    for (j, s) in scores.iter().enumerate() {
        if s.ssic < scores[n_hat].ssic {
            n_hat = j;
        }
    }
    Ok(PathReport {
        sigma_hat: sigma,
        path,
        scores,
        n_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{default_config, SignalClass};

    fn steps(len: usize, cps: &[usize], levels: &[f64]) -> Vec<f64> {
        (1..=len)
            .map(|t| levels[cps.iter().filter(|&&c| c < t).count()])
            .collect()
    }

    #[test]
    fn every_rule_finds_two_steps() {
        let ts = TimeSeries::new(steps(100, &[38, 77], &[0.0, 3.0, 0.0])).unwrap();
        for stopping in [
            StoppingRule::Threshold,
            StoppingRule::Sic,
            StoppingRule::Hybrid,
        ] {
            let config = DetectorConfig {
                stopping,
                sigma: Sigma::Fixed(0.5),
                ..default_config(SignalClass::PiecewiseConstant)
            };
            let res = detect(&ts, &config).unwrap();
            assert_eq!(res.change_points, vec![38, 77], "{stopping}");
            assert_eq!(res.fitted, ts.values());
        }
    }

    #[test]
    fn constant_series_needs_explicit_sigma() {
        let ts = TimeSeries::new(vec![1.0; 30]).unwrap();
        let config = default_config(SignalClass::PiecewiseConstant);
        assert_eq!(detect(&ts, &config), Err(Error::ZeroScale));
        let config = DetectorConfig {
            sigma: Sigma::Fixed(1.0),
            ..config
        };
        assert!(detect(&ts, &config).unwrap().change_points.is_empty());
    }

    #[test]
    fn block_averaged_detection_maps_back() {
        let ts = TimeSeries::new(steps(300, &[150], &[0.0, 4.0])).unwrap();
        let config = DetectorConfig {
            ht_scale: 5,
            sigma: Sigma::Fixed(1.0),
            stopping: StoppingRule::Threshold,
            ..default_config(SignalClass::PiecewiseConstant)
        };
        let res = detect(&ts, &config).unwrap();
        assert_eq!(res.change_points, map_locations(&[30], 5, 300));
        assert_eq!(res.fitted.len(), 300);
        assert!((res.sigma_hat - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tiny_inputs() {
        let ts = TimeSeries::new(vec![2.0]).unwrap();
        let config = DetectorConfig {
            sigma: Sigma::Fixed(1.0),
            ..default_config(SignalClass::PiecewiseConstant)
        };
        let res = detect(&ts, &config).unwrap();
        assert!(res.change_points.is_empty());
        assert_eq!(res.fitted, vec![2.0]);
    }

    #[test]
    fn path_report_on_noiseless_teeth() {
        let cps: Vec<usize> = (1..14).map(|k| 10 * k + 1).collect();
        let levels: Vec<f64> = (0..14).map(|k| (k % 2) as f64).collect();
        let ts = TimeSeries::new(steps(140, &cps, &levels)).unwrap();
        let config = DetectorConfig {
            lambda: 10,
            sigma: Sigma::Fixed(0.4),
            ..default_config(SignalClass::PiecewiseConstant)
        };
        let report = solution_path_report(&ts, &config).unwrap();
        assert_eq!(report.n_hat, 13);
        assert_eq!(report.path.model(13), cps);
        assert_eq!(report.scores.len(), report.path.len() + 1);
        let scaled = DetectorConfig {
            ht_scale: 2,
            ..config
        };
        assert!(matches!(
            solution_path_report(&ts, &scaled),
            Err(Error::InvalidConfig(_))
        ));
    }
}
