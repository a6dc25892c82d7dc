#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;
use std::path::PathBuf;

use delayed_bai::harness::{Algorithm, ExperimentConfig, Preset};
use delayed_bai::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Named high-precision constants from `tests/data/scalars.csv`.
pub fn scalars() -> HashMap<String, f64> {
    let mut r = csv::Reader::from_path(data_path("scalars.csv")).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec[1].parse().unwrap())
        })
        .collect()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        x.abs()
    } else {
        ((x - y) / y).abs()
    }
}

/// Single-point preset with the algorithm swapped in.
pub fn preset_config(name: &str, algorithm: Algorithm) -> ExperimentConfig {
    let mut c = Preset::load(name).unwrap().points.remove(0);
    c.algorithm = algorithm;
    c
}

pub fn instance(means: &[f64], sigma: f64, feedback: FeedbackModel, delay: DelayDist, k: usize) -> ProblemInstance {
    let arms = means
        .iter()
        .map(|&mu| ArmSpec::new(mu, sigma, feedback, delay))
        .collect();
    ProblemInstance::new(arms, k, 0.05, None).unwrap()
}

/// Half-open activity intervals `[start, end)` of a trace, checked against
/// per-step limits on pulls in flight overall and per arm.
pub fn max_in_flight(trace: &[delayed_bai::racing::PullRecord], n: usize) -> (usize, usize) {
    let horizon = trace.iter().map(|p| p.end).max().unwrap_or(0);
    let mut total = vec![0usize; horizon as usize + 1];
    let mut per_arm = vec![vec![0usize; horizon as usize + 1]; n];
    for p in trace {
        for s in p.start..p.end {
            total[s as usize] += 1;
            per_arm[p.arm][s as usize] += 1;
        }
    }
    let worst_arm = per_arm.iter().flatten().copied().max().unwrap_or(0);
    (total.into_iter().max().unwrap_or(0), worst_arm)
}
