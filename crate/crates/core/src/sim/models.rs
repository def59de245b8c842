//! Named test signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::SignalClass;

/// How the noiseless signal is built from the change-points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalShape {
    /// `levels[k]` holds on the k-th segment; segments end at the change-points.
    Steps { levels: Vec<f64> },
    /// Continuous and piecewise linear: `f_1 = start`, `f_2 - f_1 = slope`,
    /// and the slope changes by `slope_changes[k]` after the k-th change-point.
    Kinks {
        start: f64,
        slope: f64,
        slope_changes: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub len: usize,
    pub true_cps: Vec<usize>,
    pub class: SignalClass,
    pub sigma: f64,
    pub shape: SignalShape,
}

/// Every model name understood by [`model_spec`].
pub const MODEL_NAMES: [&str; 20] = [
    "NC", "M1", "M2", "M3", "M4", "M5", "M6", "W1", "W2", "W3", "W4", "W5", "LT2", "ELT", "NC2",
    "SW1", "SW2", "D1", "D2", "D3",
];

fn grid(step: usize, last: usize) -> Vec<usize> {
    (step..=last).step_by(step).collect()
}

fn alternating(n: usize, first: f64, second: f64) -> Vec<f64> {
    (0..n)
        .map(|k| if k % 2 == 0 { first } else { second })
        .collect()
}

fn steps(name: &str, len: usize, cps: Vec<usize>, levels: Vec<f64>, sigma: f64) -> ModelSpec {
    debug_assert_eq!(levels.len(), cps.len() + 1);
    ModelSpec {
        name: name.into(),
        len,
        true_cps: cps,
        class: SignalClass::PiecewiseConstant,
        sigma,
        shape: SignalShape::Steps { levels },
    }
}

fn kinks(
    name: &str,
    len: usize,
    cps: Vec<usize>,
    (start, slope): (f64, f64),
    slope_changes: Vec<f64>,
    sigma: f64,
) -> ModelSpec {
    debug_assert_eq!(slope_changes.len(), cps.len());
    ModelSpec {
        name: name.into(),
        len,
        true_cps: cps,
        class: SignalClass::ContinuousPiecewiseLinear,
        sigma,
        shape: SignalShape::Kinks {
            start,
            slope,
            slope_changes,
        },
    }
}

/// Looks up a model by name (case-insensitive).
pub fn model_spec(name: &str) -> Result<ModelSpec> {
    let key = name.to_ascii_uppercase();
    let spec = match key.as_str() {
        "NC" => steps("NC", 3000, vec![], vec![0.0], 1.0),
        "NC2" => steps("NC2", 300, vec![], vec![0.0], 1.0),
        "M1" => steps(
            "M1",
            2048,
            vec![205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659],
            vec![
                0.0, 14.64, -3.66, 7.32, -7.32, 10.98, -4.39, 3.29, 19.03, 7.68, 15.37, 0.0,
            ],
            10.0,
        ),
        "M2" => steps(
            "M2",
            140,
            (1..=13).map(|k| 10 * k + 1).collect(),
            alternating(14, 0.0, 1.0),
            0.4,
        ),
        "M3" => steps(
            "M3",
            150,
            (1..=14).map(|k| 10 * k + 1).collect(),
            (1..=15).map(f64::from).collect(),
            0.3,
        ),
        "M4" => steps("M4", 2000, vec![1000, 1020], vec![0.0, 1.5, 0.0], 1.0),
        "M5" => steps(
            "M5",
            20_000,
            grid(10, 19_990),
            alternating(2000, 0.0, 3.0),
            0.8,
        ),
        "M6" => steps(
            "M6",
            10_000,
            grid(20, 9980),
            (0..500).map(|k| 2.0 * k as f64).collect(),
            1.0,
        ),
        "LT2" => steps(
            "LT2",
            10_000,
            grid(40, 9960),
            alternating(250, 0.0, 1.5),
            1.0,
        ),
        "ELT" => steps(
            "ELT",
            100_000,
            grid(5, 99_995),
            alternating(20_000, 0.0, 2.0),
            0.3,
        ),
        "D1" => steps("D1", 100_000, vec![], vec![0.0], 1.0),
        "D2" => steps(
            "D2",
            100_000,
            vec![25_000, 55_000, 85_000],
            vec![0.0, 3.0, -3.0, 2.0],
            1.0,
        ),
        "D3" => steps(
            "D3",
            100_000,
            vec![16_000, 22_000, 28_000, 46_000, 62_000, 74_000, 86_000],
            vec![0.0, 4.0, -4.0, 4.0, -4.0, 4.0, -4.0, 4.0],
            1.0,
        ),
        "W1" => kinks(
            "W1",
            1500,
            grid(150, 1350),
            (-0.5, 1.0 / 64.0),
            alternating(9, -1.0 / 32.0, 1.0 / 32.0),
            1.0,
        ),
        "W2" => kinks(
            "W2",
            1500,
            grid(15, 1485),
            (-0.5, 1.0 / 40.0),
            alternating(99, -1.0, 1.0),
            1.0,
        ),
        "W3" => kinks(
            "W3",
            840,
            grid(7, 833),
            (-0.5, 1.0 / 32.0),
            alternating(119, -1.0, 1.0),
            0.3,
        ),
        "W4" => kinks(
            "W4",
            200,
            grid(20, 180),
            (1.0, 1.0 / 32.0),
            vec![
                1.0 / 6.0,
                3.0 / 6.0,
                -3.0 / 4.0,
                -1.0 / 3.0,
                -2.0 / 3.0,
                1.0,
                1.0 / 4.0,
                3.0 / 4.0,
                -5.0 / 4.0,
            ],
            0.3,
        ),
        "W5" => kinks(
            "W5",
            1000,
            grid(50, 950),
            (1.0, 1.0 / 32.0),
            [
                -2.0, -10.0, -20.0, 32.0, 10.0, 15.0, -20.0, -7.0, -24.0, 26.0, 10.0, 19.0, -32.0,
                -20.0, 23.0, 16.0, 30.0, -50.0, -40.0,
            ]
            .iter()
            .map(|v| v / 32.0)
            .collect(),
            0.6,
        ),
        "SW1" => kinks(
            "SW1",
            2400,
            grid(20, 2380),
            (1.0, 1.25),
            alternating(119, 2.5, -2.5),
            3.0,
        ),
        "SW2" => kinks(
            "SW2",
            1500,
            grid(50, 1450),
            (-0.5, 1.0 / 24.0),
            alternating(29, -1.0 / 7.0, 1.0 / 7.0),
            1.0,
        ),
        _ => return Err(Error::UnknownModel(name.to_string())),
    };
    Ok(spec)
}

/// The noiseless signal `f_1, ..., f_T` of `spec`.
pub fn generate_signal(spec: &ModelSpec) -> Vec<f64> {
    let len = spec.len;
    let mut f = Vec::with_capacity(len);
    match &spec.shape {
        SignalShape::Steps { levels } => {
            let mut k = 0;
            for t in 1..=len {
                if k < spec.true_cps.len() && t > spec.true_cps[k] {
                    k += 1;
                }
                f.push(levels[k]);
            }
        }
        SignalShape::Kinks {
            start,
            slope,
            slope_changes,
        } => {
            let (mut value, mut slope, mut k) = (*start, *slope, 0);
            for t in 1..=len {
                f.push(value);
                // slope on (t, t + 1)
                if k < spec.true_cps.len() && t == spec.true_cps[k] {
                    slope += slope_changes[k];
                    k += 1;
                }
                value += slope;
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        for name in MODEL_NAMES {
            let spec = model_spec(name).unwrap();
            assert_eq!(spec.name, name);
            assert_eq!(generate_signal(&spec).len(), spec.len);
            assert!(spec.true_cps.windows(2).all(|w| w[0] < w[1]));
            assert!(spec.true_cps.iter().all(|&c| c >= 1 && c < spec.len));
        }
        assert_eq!(model_spec("m2").unwrap().name, "M2");
        assert_eq!(
            model_spec("bogus"),
            Err(Error::UnknownModel("bogus".into()))
        );
    }

    #[test]
    fn counts() {
        let count = |n: &str| model_spec(n).unwrap().true_cps.len();
        assert_eq!(count("M2"), 13);
        assert_eq!(count("M5"), 1999);
        assert_eq!(count("M6"), 499);
        assert_eq!(count("W2"), 99);
        assert_eq!(count("W3"), 119);
        assert_eq!(count("W5"), 19);
        assert_eq!(count("LT2"), 249);
        assert_eq!(count("ELT"), 19_999);
        assert_eq!(count("SW1"), 119);
        assert_eq!(count("SW2"), 29);
    }

    #[test]
    fn middle_points_layout() {
        let f = generate_signal(&model_spec("M4").unwrap());
        assert!(f[..1000].iter().all(|&v| v == 0.0));
        assert!(f[1000..1020].iter().all(|&v| v == 1.5));
        assert!(f[1020..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wave_start() {
        let f = generate_signal(&model_spec("W1").unwrap());
        assert_eq!(f[0], -0.5);
        assert!((f[1] - f[0] - 1.0 / 64.0).abs() < 1e-15);
        // slope after the first kink
        assert!((f[151] - f[150] - (1.0 / 64.0 - 1.0 / 32.0)).abs() < 1e-12);
    }
}
