//! Shared fixtures for the benchmarks.

use idetect_core::sim::{add_noise, generate_signal, model_spec, NoiseDist};
use idetect_core::{ContrastKernel, SignalClass, TimeSeries};

/// One seeded Gaussian realization of the named model.
pub fn model_series(name: &str, seed: u64) -> (TimeSeries, SignalClass) {
    let spec = model_spec(name).expect("known model");
    let x = add_noise(
        &generate_signal(&spec),
        spec.sigma,
        NoiseDist::Gaussian,
        seed,
    )
    .expect("valid noise");
    (x, spec.class)
}

/// Contrast kernel over a seeded realization of the named model.
pub fn kernel(name: &str, seed: u64) -> ContrastKernel {
    let (x, class) = model_series(name, seed);
    ContrastKernel::new(class, &x)
}
