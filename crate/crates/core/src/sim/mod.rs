//! Simulation harness: named signals, noise, accuracy metrics, brute-force
//! oracles and the benchmark runner.

pub mod bench;
pub mod metrics;
pub mod models;
pub mod noise;
pub mod oracle;

pub use bench::{
    aggregate, bench_run, bins_for, run_replication, BenchPipeline, BenchReport, BenchRow, Bin,
    RepOutcome,
};
pub use metrics::{hausdorff_scaled, longest_segment, mse};
pub use models::{generate_signal, model_spec, ModelSpec, SignalShape, MODEL_NAMES};
pub use noise::{add_noise, replication_seed, NoiseDist};
pub use oracle::{oracle_argmax, oracle_contrast, oracle_optimal_segmentation};
