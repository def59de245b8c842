//! Domain records shared across the crate: series, configuration,
//! per-detection estimates, final results and the solution path.
//!
//! All indices are 1-based. A change-point `b` denotes the last index of the
//! old regime: the mean changes between `b` and `b + 1` (or the slope kinks at
//! `b`), so valid locations lie in `[1, T - 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered, finite, non-empty sequence of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Validates raw observations. See [`validate_series`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index: i + 1 });
        }
        Ok(Self { values })
    }

    /// Series length `T`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observation `X_t` for 1-based `t`.
    #[inline]
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Returns a new series with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<TimeSeries> for Vec<f64> {
    fn from(series: TimeSeries) -> Self {
        series.values
    }
}

/// Checks that `raw` is non-empty and finite.
pub fn validate_series(raw: &[f64]) -> Result<TimeSeries> {
    TimeSeries::new(raw.to_vec())
}

/// Structure of the underlying mean signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalClass {
    /// Level shifts.
    PiecewiseConstant,
    /// Slope changes of a continuous signal.
    ContinuousPiecewiseLinear,
}

impl SignalClass {
    /// Smallest `e - s` for which some candidate `b` exists.
    pub fn min_span(self) -> usize {
        match self {
            SignalClass::PiecewiseConstant => 1,
            SignalClass::ContinuousPiecewiseLinear => 2,
        }
    }

    /// Number of free parameters of a model with `j` change-points.
    pub fn n_params(self, j: usize) -> usize {
        match self {
            SignalClass::PiecewiseConstant => j + 1,
            SignalClass::ContinuousPiecewiseLinear => j + 2,
        }
    }

    /// First index of the segment that follows a change at `b`.
    ///
    /// For level shifts `X_b` still belongs to the old regime; for a kink the
    /// point `b` is shared by both linear pieces.
    #[inline]
    pub fn segment_start_after(self, b: usize) -> usize {
        match self {
            SignalClass::PiecewiseConstant => b + 1,
            SignalClass::ContinuousPiecewiseLinear => b,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SignalClass::PiecewiseConstant => "pcm",
            SignalClass::ContinuousPiecewiseLinear => "cplm",
        }
    }
}

impl fmt::Display for SignalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SignalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcm" | "piecewise_constant" | "constant" => Ok(SignalClass::PiecewiseConstant),
            "cplm" | "continuous_piecewise_linear" | "linear" => {
                Ok(SignalClass::ContinuousPiecewiseLinear)
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown signal class `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    Threshold,
    Sic,
    Hybrid,
}

impl FromStr for StoppingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "threshold" | "th" => Ok(StoppingRule::Threshold),
            "sic" | "ssic" | "ic" => Ok(StoppingRule::Sic),
            "hybrid" => Ok(StoppingRule::Hybrid),
            other => Err(Error::InvalidConfig(format!(
                "unknown stopping rule `{other}`"
            ))),
        }
    }
}

impl fmt::Display for StoppingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StoppingRule::Threshold => "threshold",
            StoppingRule::Sic => "sic",
            StoppingRule::Hybrid => "hybrid",
        })
    }
}

/// Where the scan restarts after a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartMode {
    /// Restart from the end (start) of the right- (left-) expanding interval.
    IntervalEnd,
    /// Restart from the detected location itself.
    EstimatePoint,
}

/// Which parts of the pruning algorithm build the solution path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    FullParts1to4,
    FastPart4Only,
}

/// Noise standard deviation: estimated from the data or supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SigmaRepr", into = "SigmaRepr")]
pub enum Sigma {
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SigmaRepr {
    Value(f64),
    Text(String),
}

impl TryFrom<SigmaRepr> for Sigma {
    type Error = Error;

    fn try_from(repr: SigmaRepr) -> Result<Self> {
        match repr {
            SigmaRepr::Value(v) => Sigma::fixed(v),
            SigmaRepr::Text(t) => t.parse(),
        }
    }
}

impl From<Sigma> for SigmaRepr {
    fn from(sigma: Sigma) -> Self {
        match sigma {
            Sigma::Auto => SigmaRepr::Text("auto".into()),
            Sigma::Fixed(v) => SigmaRepr::Value(v),
        }
    }
}

impl Sigma {
    pub fn fixed(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Sigma::Fixed(value))
        } else {
            Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {value}"
            )))
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Sigma::Auto);
        }
        let v: f64 = s.parse().map_err(|_| {
            Error::InvalidConfig(format!("sigma must be `auto` or a number, got `{s}`"))
        })?;
        Sigma::fixed(v)
    }
}

/// Every tunable of the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub class: SignalClass,
    /// Expansion step of the interval grid.
    pub lambda: usize,
    /// `C` in the threshold `C * sigma * sqrt(2 ln T)`.
    pub threshold_const: f64,
    /// Lower constant used when over-detecting for the solution path.
    pub path_threshold_const: f64,
    pub stopping: StoppingRule,
    pub restart_mode: RestartMode,
    /// Exponent of the strengthened SIC penalty `(ln T)^alpha`.
    pub sic_alpha: f64,
    /// Hybrid rule: threshold result accepted when it finds more than this.
    pub hybrid_jstar: usize,
    /// Expansion step of the hybrid rule's information-criterion stage.
    pub hybrid_lambda: usize,
    pub window_len: usize,
    /// Windowing applies only when `T` is strictly larger than this.
    pub window_trigger: usize,
    /// Block-averaging scale; 1 disables the heavy-tail transform.
    pub ht_scale: usize,
    pub sigma: Sigma,
    pub path_mode: PathMode,
    /// Distance scale `C*` of the full pruning algorithm.
    pub path_cstar: f64,
    /// Contrast floor constant of the full pruning algorithm.
    pub path_contrast_floor: f64,
}

/// Calibrated defaults for `class`.
pub fn default_config(class: SignalClass) -> DetectorConfig {
    let (threshold_const, path_threshold_const) = match class {
        SignalClass::PiecewiseConstant => (1.0, 0.9),
        SignalClass::ContinuousPiecewiseLinear => (1.4, 1.25),
    };
    DetectorConfig {
        class,
        lambda: 3,
        threshold_const,
        path_threshold_const,
        stopping: StoppingRule::Hybrid,
        restart_mode: RestartMode::EstimatePoint,
        sic_alpha: 1.01,
        hybrid_jstar: 100,
        hybrid_lambda: 10,
        window_len: 3000,
        window_trigger: 12000,
        ht_scale: 1,
        sigma: Sigma::Auto,
        path_mode: PathMode::FastPart4Only,
        path_cstar: 1.0,
        path_contrast_floor: 2.0 * std::f64::consts::SQRT_2,
    }
}

impl DetectorConfig {
    pub fn new(class: SignalClass) -> Self {
        default_config(class)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.lambda == 0 || self.hybrid_lambda == 0 {
            return bad("lambda must be at least 1".into());
        }
        if self.sic_alpha.is_nan() || self.sic_alpha <= 1.0 {
            return bad(format!("sic_alpha must exceed 1, got {}", self.sic_alpha));
        }
        if self.window_len == 0 || self.window_len > self.window_trigger {
            return bad(format!(
                "window_len ({}) must be positive and at most window_trigger ({})",
                self.window_len, self.window_trigger
            ));
        }
        if self.ht_scale == 0 {
            return bad("ht_scale must be at least 1".into());
        }
        if self.hybrid_jstar == 0 {
            return bad("hybrid_jstar must be at least 1".into());
        }
        for (name, v) in [
            ("threshold_const", self.threshold_const),
            ("path_threshold_const", self.path_threshold_const),
            ("path_cstar", self.path_cstar),
            ("path_contrast_floor", self.path_contrast_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Sigma::Fixed(v) = self.sigma {
            Sigma::fixed(v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    RightExpanding,
    LeftExpanding,
}

/// A single detection made by the isolation scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangePointEstimate {
    pub location: usize,
    pub contrast_value: f64,
    /// Sub-interval `(s, e)` on which the detection happened.
    pub interval: (usize, usize),
    pub side: Side,
}

/// Final output of a detection pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub change_points: Vec<usize>,
    /// Least-squares fit between consecutive change-points.
    pub fitted: Vec<f64>,
    /// Noise scale used by the detector, on the series actually scanned.
    pub sigma_hat: f64,
    pub config_echo: DetectorConfig,
    /// Rule that produced the change-points (`threshold` or `sic` for the hybrid).
    pub stopping_used: StoppingRule,
}

impl DetectionResult {
    pub fn n_change_points(&self) -> usize {
        self.change_points.len()
    }
}

/// Removal ordering of over-detected estimates.
///
/// `ordered_removals[J - 1]` was removed first, so the nested model
/// `M_j` is the first `j` entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionPath {
    pub ordered_removals: Vec<usize>,
}

impl SolutionPath {
    pub fn len(&self) -> usize {
        self.ordered_removals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered_removals.is_empty()
    }

    /// Sorted locations of `M_j`. Panics if `j > J`.
    pub fn model(&self, j: usize) -> Vec<usize> {
        let mut m = self.ordered_removals[..j].to_vec();
        m.sort_unstable();
        m
    }

    /// The nested family `M_0, ..., M_J`.
    pub fn models(&self) -> Vec<Vec<usize>> {
        (0..=self.len()).map(|j| self.model(j)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SolutionPathRepr {
    ordered_removals: Vec<usize>,
    #[serde(default)]
    models: Option<Vec<Vec<usize>>>,
}

impl Serialize for SolutionPath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SolutionPathRepr {
            ordered_removals: self.ordered_removals.clone(),
            models: Some(self.models()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SolutionPath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SolutionPathRepr::deserialize(deserializer)?;
        let path = SolutionPath {
            ordered_removals: repr.ordered_removals,
        };
        let mut seen = path.ordered_removals.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) || seen.first() == Some(&0) {
            return Err(D::Error::custom(
                "ordered_removals must be distinct positive locations",
            ));
        }
        if let Some(models) = repr.models {
            if models != path.models() {
                return Err(D::Error::custom(
                    "models are inconsistent with ordered_removals",
                ));
            }
        }
        Ok(path)
    }
}
