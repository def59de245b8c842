use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idetect_bench::{kernel, model_series};
use idetect_core::{
    default_config, detect, estimate_sigma_mad, overdetect, solution_path, DetectorConfig,
    PathConfig, StoppingRule,
};

fn argmax(c: &mut Criterion) {
    let mut group = c.benchmark_group("argmax");
    for model in ["M1", "W1"] {
        let k = kernel(model, 1);
        group.bench_function(model, |b| {
            b.iter(|| k.argmax(1, black_box(k.len())).unwrap())
        });
    }
    group.finish();
}

fn stopping_rules(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect");
    for model in ["M2", "M4", "W1", "W3"] {
        let (x, class) = model_series(model, 1);
        for stopping in [
            StoppingRule::Threshold,
            StoppingRule::Sic,
            StoppingRule::Hybrid,
        ] {
            let config = DetectorConfig {
                stopping,
                ..default_config(class)
            };
            group.bench_with_input(BenchmarkId::new(model, stopping), &config, |b, cfg| {
                b.iter(|| detect(black_box(&x), cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn long_signals(c: &mut Criterion) {
    let mut group = c.benchmark_group("long");
    group.sample_size(10);
    for model in ["M5", "ELT", "D3"] {
        let (x, class) = model_series(model, 1);
        let config = default_config(class);
        group.bench_function(model, |b| {
            b.iter(|| detect(black_box(&x), &config).unwrap())
        });
    }
    group.finish();
}

fn path(c: &mut Criterion) {
    let (x, class) = model_series("M3", 1);
    let k = kernel("M3", 1);
    let config = default_config(class);
    let sigma = estimate_sigma_mad(&x, class).unwrap();
    let points: Vec<usize> = overdetect(&k, &config, sigma)
        .unwrap()
        .iter()
        .map(|e| e.location)
        .collect();
    let pcfg = PathConfig::from(&config);
    c.bench_function("solution_path/M3", |b| {
        b.iter(|| solution_path(&k, black_box(&points), &pcfg, sigma))
    });
}

criterion_group!(benches, argmax, stopping_rules, long_signals, path);
criterion_main!(benches);
