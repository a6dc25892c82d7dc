//! Seeded replications, CSV output and paired improvement ratios.

mod config;
mod presets;

pub use config::{build_means, Algorithm, ExperimentConfig, Family, MeanFamily};
pub use presets::{preset_names, Preset, PRESET_VERSION};

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::batch_race;
use crate::budget::{sar, sar_full_df, sar_naive_df};
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::racing::{race, RunResult};

/// Environment variable holding the worker count; unset or 0 means one
/// worker per available core.
pub const WORKERS_ENV: &str = "BAI_WORKERS";

/// Column order of the results CSV.
pub const CSV_COLUMNS: [&str; 10] = [
    "run_id",
    "algorithm",
    "preset",
    "n",
    "k",
    "delta",
    "seed",
    "delayed_sample_complexity",
    "correct",
    "wall_ms",
];

/// One replication of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub run_id: u64,
    pub algorithm: String,
    pub preset: String,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub seed: u64,
    pub delayed_sample_complexity: u64,
    pub correct: bool,
    pub wall_ms: u64,
}

/// Seed of replication `run_id`: word `run_id` of the master seed's stream.
pub fn run_seed(master_seed: u64, run_id: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_word_pos(u128::from(run_id) * 2);
    rng.next_u64()
}

/// Runs the configured algorithm once.
pub fn run_single(config: &ExperimentConfig, instance: &ProblemInstance, seed: u64) -> Result<RunResult> {
    let lil = config.lil()?;
    match config.algorithm.family() {
        Family::Race => race(instance, seed, config.racer().expect("racing algorithm"), lil),
        Family::Batch => batch_race(
            instance,
            config.batch(),
            seed,
            config.racer().expect("batch algorithm"),
            lil,
        ),
        Family::Budget => {
            let t_max = config
                .t_max
                .ok_or_else(|| Error::Config(format!("{} needs t_max", config.algorithm)))?;
            match config.algorithm {
                Algorithm::Sar => sar(instance, t_max, seed),
                Algorithm::SarFullDf => sar_full_df(instance, t_max, seed),
                _ => sar_naive_df(instance, t_max, seed),
            }
        }
    }
}

/// `(delayed_sample_complexity, correct)`, or `(0, false)` if the run
/// errs or panics.
fn outcome<F: FnOnce() -> Result<RunResult>>(run: F) -> (u64, bool) {
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(r)) => (r.delayed_sample_complexity, r.correct),
        _ => (0, false),
    }
}

fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs `config.runs` replications. Rows come back ordered by `run_id`; a
/// replication that panics yields a row with `correct = false`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let instance = config.instance()?;
    let k = config.k();
    let one = |run_id: u64| -> ResultRow {
        let seed = run_seed(config.master_seed, run_id);
        let started = Instant::now();
        let (t, correct) = outcome(|| run_single(config, &instance, seed));
        ResultRow {
            run_id,
            algorithm: config.algorithm.name().into(),
            preset: config.preset.clone(),
            n: config.n,
            k,
            delta: config.delta,
            seed,
            delayed_sample_complexity: t,
            correct,
            wall_ms: if config.record_wall_ms {
                started.elapsed().as_millis() as u64
            } else {
                0
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut rows: Vec<ResultRow> = pool.install(|| (0..config.runs).into_par_iter().map(one).collect());
    rows.sort_by_key(|r| r.run_id);
    Ok(rows)
}

/// Runs every algorithm on every point of a preset. `runs` and
/// `master_seed` override the preset's values when given.
pub fn run_preset(
    preset: &Preset,
    algorithms: &[Algorithm],
    runs: Option<u64>,
    master_seed: Option<u64>,
) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for point in &preset.points {
        for &algorithm in algorithms {
            let mut config = point.clone();
            config.algorithm = algorithm;
            if let Some(r) = runs {
                config.runs = r;
            }
            if let Some(s) = master_seed {
                config.master_seed = s;
            }
            rows.extend(run_experiment(&config)?);
        }
    }
    Ok(rows)
}

/// Writes the header and the rows, LF-terminated.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Paired ratios `t_partial / t_full`, matched by seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    /// `(seed, ratio)` in ascending seed order.
    pub ratios: Vec<(u64, f64)>,
    pub mean: f64,
    /// Sample standard deviation; 0 for fewer than two pairs.
    pub std: f64,
}

pub fn improvement_ratio(partial: &[ResultRow], full: &[ResultRow]) -> Result<RatioSummary> {
    let by_seed = |rows: &[ResultRow]| -> Result<BTreeMap<u64, u64>> {
        let mut m = BTreeMap::new();
        for r in rows {
            if m.insert(r.seed, r.delayed_sample_complexity).is_some() {
                return Err(Error::Mismatch(format!("seed {} appears twice", r.seed)));
            }
        }
        Ok(m)
    };
    let p = by_seed(partial)?;
    let f = by_seed(full)?;
    if p.len() != f.len() || p.keys().ne(f.keys()) {
        return Err(Error::Mismatch("partial and full rows use different seeds".into()));
    }
    let ratios: Vec<(u64, f64)> = p
        .iter()
        .map(|(&seed, &tp)| (seed, tp as f64 / f[&seed] as f64))
        .collect();
    let m = ratios.len() as f64;
    let mean = ratios.iter().map(|r| r.1).sum::<f64>() / m;
    let std = if ratios.len() < 2 {
        0.0
    } else {
        (ratios.iter().map(|r| (r.1 - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    };
    Ok(RatioSummary { ratios, mean, std })
}

/// Mean paired ratio of one algorithm against its baseline at one preset point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub preset: String,
    pub algorithm: String,
    pub baseline: String,
    pub runs: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
}

/// Ratios for every algorithm whose baseline was also run, per preset point.
pub fn ratio_table(rows: &[ResultRow]) -> Result<Vec<RatioRow>> {
    let mut groups: BTreeMap<(String, String), Vec<ResultRow>> = BTreeMap::new();
    let mut points = Vec::new();
    for r in rows {
        if !points.contains(&r.preset) {
            points.push(r.preset.clone());
        }
        groups
            .entry((r.preset.clone(), r.algorithm.clone()))
            .or_default()
            .push(r.clone());
    }
    let mut out = Vec::new();
    for point in &points {
        for algorithm in Algorithm::ALL {
            let Some(base) = algorithm.baseline() else { continue };
            let key = |a: Algorithm| (point.clone(), a.name().to_string());
            if let (Some(p), Some(f)) = (groups.get(&key(algorithm)), groups.get(&key(base))) {
                let s = improvement_ratio(p, f)?;
                out.push(RatioRow {
                    preset: point.clone(),
                    algorithm: algorithm.name().into(),
                    baseline: base.name().into(),
                    runs: s.ratios.len(),
                    mean_ratio: s.mean,
                    std_ratio: s.std,
                });
            }
        }
    }
    Ok(out)
}

pub fn write_ratio_csv<W: Write>(rows: &[RatioRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
