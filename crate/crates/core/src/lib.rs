//! Multiple change-point detection by interval isolation.
//!
//! Level shifts and slope kinks are located by scanning intervals that grow
//! from both ends of the series and testing a contrast statistic against a
//! threshold. The number of change-points can instead be chosen by an
//! information criterion on a solution path, or by a hybrid of both rules.
//!
//! ```
//! use idetect_core::{detect, default_config, SignalClass, TimeSeries};
//!
//! let x: Vec<f64> = (1..=200).map(|t| if t <= 120 { 0.0 } else { 1.0 }).collect();
//! let mut config = default_config(SignalClass::PiecewiseConstant);
//! config.sigma = "0.1".parse().unwrap();
//! let result = detect(&TimeSeries::new(x).unwrap(), &config).unwrap();
//! assert_eq!(result.change_points, vec![120]);
//! ```

pub mod contrast;
pub mod detect;
pub mod error;
pub mod fit;
pub mod pipeline;
pub mod preprocess;
mod prune;
pub mod select;
pub mod sim;
pub mod types;

pub use contrast::{
    argmax_contrast, cplm_contrast, cplm_contrast_vector, cusum, helper_vectors, ContrastKernel,
    PrefixTables,
};
pub use detect::{
    detect_in_interval, detect_windowed, expanding_sequences, expansion_grid, isolate_detect,
    isolate_detect_range, threshold_value, ExpansionGrid, ScanParams, WindowPolicy,
    WorkingInterval,
};
pub use error::{Error, Result};
pub use fit::{rss, segment_fit};
pub use pipeline::{detect, solution_path_report, PathReport};
pub use preprocess::{
    adapt_lambda, block_average, estimate_sigma_mad, map_locations, ScaleTransform,
};
pub use select::{
    hybrid_detect, neighbor_contrast, overdetect, score_path, select_model, solution_path,
    ssic_score, ModelChoice, PathConfig, ScoredModel, SsicScore,
};
pub use types::*;
