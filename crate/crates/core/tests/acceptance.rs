//! The eight acceptance criteria, run in order. Each prints one line:
//!
//! ```text
//! criterion N PASS|FAIL: detail
//! ```
//!
//! and the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use delayed_bai::batch::{batch_race, BatchConfig};
use delayed_bai::budget::{h2_complexity, misid_upper_bound, sar, sar_full_df, sar_naive_df, sar_schedule};
use delayed_bai::harness::{
    improvement_ratio, preset_names, run_experiment, run_preset, write_csv, Algorithm, ExperimentConfig,
    Family, Preset, ResultRow,
};
use delayed_bai::lil::{LilParams, PartialShape, SplitCache};
use delayed_bai::model::{gaussian_std, sample_pull, substream, ArmSpec, DelayDist, FeedbackModel};
use delayed_bai::racing::{race, update_arm_sets, ArmSets, ArmStatus, Racer};

use common::oracle::{counting_oracle, grid_min, rational_h2, rational_schedule, simplex_grid_min};
use common::{data_path, instance, preset_config, rel_err};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn experiment(preset: &str, algorithm: Algorithm, runs: u64, seed: u64) -> Vec<ResultRow> {
    let mut c = preset_config(preset, algorithm);
    c.runs = runs;
    c.master_seed = seed;
    run_experiment(&c).unwrap()
}

fn misid_rate(rows: &[ResultRow]) -> f64 {
    rows.iter().filter(|r| !r.correct).count() as f64 / rows.len() as f64
}

fn mean_t(rows: &[ResultRow]) -> f64 {
    rows.iter().map(|r| r.delayed_sample_complexity as f64).sum::<f64>() / rows.len() as f64
}

/// Misidentification rate of each fixed-confidence algorithm on free means.
fn confidence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let runs = [
        ("free-means", Algorithm::RaceFullDf),
        ("free-means", Algorithm::RaceUnbiasedPf),
        ("free-means", Algorithm::RaceBiasedPf),
        ("free-means", Algorithm::BatchFull),
        ("free-means", Algorithm::BatchPf),
        ("biased-free-means", Algorithm::RaceBiasedPf),
    ];
    for (preset, algorithm) in runs {
        let started = Instant::now();
        let rows = experiment(preset, algorithm, 200, 1);
        let rate = misid_rate(&rows);
        let secs = started.elapsed().as_secs_f64();
        ok &= rate <= 0.075 && secs < 120.0;
        parts.push(format!("{algorithm}@{preset} {rate:.3} ({secs:.1}s)"));
    }
    check(ok, format!("misid rates over 200 runs, limit 0.075: {}", parts.join(", ")))
}

/// Partial feedback never costs time: identical traces when it is useless,
/// shorter runs when it is informative.
fn never_worse() -> Outcome {
    let lil = LilParams::default();
    let mut c = preset_config("free-means", Algorithm::RaceUnbiasedPf);
    c.sigma_p = 1e6 * c.sigma;
    let inst = c.instance().unwrap();
    let identical = (0..50).all(|seed| {
        let full = race(&inst, seed, Racer::FullDf, lil).unwrap();
        let pf = race(&inst, seed, Racer::UnbiasedPf, lil).unwrap();
        full == pf
    });

    let full = experiment("free-means", Algorithm::RaceFullDf, 100, 2);
    let pf = experiment("free-means", Algorithm::RaceUnbiasedPf, 100, 2);
    let free = improvement_ratio(&pf, &full).unwrap().mean;

    // best paired ratio over every preset point that compares a racer with
    // its full-feedback baseline
    let mut best = (f64::INFINITY, String::new());
    for (name, _) in preset_names().unwrap() {
        let preset = Preset::load(&name).unwrap();
        for (partial, baseline) in [
            (Algorithm::RaceUnbiasedPf, Algorithm::RaceFullDf),
            (Algorithm::BatchPf, Algorithm::BatchFull),
        ] {
            if !(preset.algorithms.contains(&partial) && preset.algorithms.contains(&baseline)) {
                continue;
            }
            let rows = run_preset(&preset, &[partial, baseline], Some(100), Some(3)).unwrap();
            for point in &preset.points {
                let of = |a: Algorithm| -> Vec<ResultRow> {
                    rows.iter()
                        .filter(|r| r.preset == point.preset && r.algorithm == a.name())
                        .cloned()
                        .collect()
                };
                let ratio = improvement_ratio(&of(partial), &of(baseline)).unwrap().mean;
                if ratio < best.0 {
                    best = (ratio, format!("{} {partial}", point.preset));
                }
            }
        }
    }
    check(
        identical && free < 1.0 && best.0 < 0.90,
        format!(
            "sigma_p=1e6 sigma traces identical on 50 seeds: {identical}; free-means ratio {free:.4} (< 1); best preset ratio {:.4} at {} (< 0.90)",
            best.0, best.1
        ),
    )
}

/// Batches of one match the sequential racers; batches of ten finish sooner.
fn batch_reduction() -> Outcome {
    let lil = LilParams::default();
    let inst = preset_config("free-means", Algorithm::BatchPf).instance().unwrap();
    let one = BatchConfig::new(1, 1);
    let identical = (0..50).all(|seed| {
        let full = race(&inst, seed, Racer::FullDf, lil).unwrap()
            == batch_race(&inst, one, seed, Racer::FullDf, lil).unwrap();
        let pf = race(&inst, seed, Racer::UnbiasedPf, lil).unwrap()
            == batch_race(&inst, one.with_cancel(true), seed, Racer::UnbiasedPf, lil).unwrap();
        full && pf
    });
    let seq_full = mean_t(&experiment("free-means", Algorithm::RaceFullDf, 100, 4));
    let seq_pf = mean_t(&experiment("free-means", Algorithm::RaceUnbiasedPf, 100, 4));
    let bat_full = mean_t(&experiment("free-means", Algorithm::BatchFull, 100, 4));
    let bat_pf = mean_t(&experiment("free-means", Algorithm::BatchPf, 100, 4));
    check(
        identical && bat_full < seq_full && bat_pf < seq_pf,
        format!(
            "b=r=1 identical on 50 seeds: {identical}; b=r=10 mean t full {bat_full:.0} vs {seq_full:.0}, partial {bat_pf:.0} vs {seq_pf:.0}"
        ),
    )
}

/// Randomized budget audits of the three fixed-budget algorithms.
fn budget_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = [0u32; 3];
    for _ in 0..1000 {
        let n = rng.random_range(3..=20usize);
        let k = rng.random_range(1..n);
        let hi = rng.random_range(1..=20u64);
        let t_max = rng.random_range(n as u64 + 1..=20_000);
        let means: Vec<f64> = (0..n).map(|i| 1.0 - i as f64 / n as f64).collect();
        let inst = instance(
            &means,
            rng.random_range(0.0..1.0),
            FeedbackModel::FullDelayed,
            DelayDist::UniformInt { lo: 1, hi },
            k,
        );
        let seed = rng.random();
        let runs = [
            sar_full_df(&inst, t_max, seed).unwrap(),
            sar(&inst, t_max, seed).unwrap(),
            sar_naive_df(&inst, t_max, seed).unwrap(),
        ];
        for (i, r) in runs.iter().enumerate() {
            if r.delayed_sample_complexity > t_max || r.accepted.len() != k {
                failures[i] += 1;
            }
        }
    }
    check(
        failures == [0; 3],
        format!(
            "1000 random runs each, budget or |A| violations: sar_full_df {}, sar {}, sar_naive_df {}",
            failures[0], failures[1], failures[2]
        ),
    )
}

/// SAR's empirical error against the analytic bound.
fn misid_bound() -> Outcome {
    let means = [0.8, 0.6, 0.4, 0.2];
    let h2 = h2_complexity(&means, 2).unwrap();
    let t_max = 4506;
    let bound = misid_upper_bound(4, t_max, h2).unwrap();
    // unit sub-Gaussian scale, the setting the bound is stated for
    let inst = instance(&means, 1.0, FeedbackModel::FullDelayed, DelayDist::Constant { d: 1 }, 2);
    let errors = (0..500).filter(|&s| !sar(&inst, t_max, s).unwrap().correct).count();
    let rate = errors as f64 / 500.0;
    check(
        bound > 0.05 && bound < 0.5 && rate <= bound + 0.03,
        format!("H2 {h2}, T_max {t_max}: bound {bound:.4}, empirical error {rate:.4} over 500 runs"),
    )
}

/// The oracle suites, condensed.
fn oracles() -> Outcome {
    let p = LilParams::default();
    let mut worst_radius: f64 = 0.0;
    let mut r = csv::Reader::from_path(data_path("radius_oracle.csv")).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let got = p
            .radius(rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[2].parse().unwrap())
            .unwrap()
            .value;
        worst_radius = worst_radius.max(rel_err(got, rec[3].parse().unwrap()));
    }

    let delta = 0.05;
    let shape = PartialShape::unbiased(1.0, 0.3, 2, 5, 10);
    let split = p.split_delta_unbiased(&shape, delta).unwrap();
    let grid = grid_min(|df| p.combined_radius_unbiased(&shape, df, delta - df).unwrap(), 0.0, delta, 10_000, 1);
    let gap_unbiased = (split.radius - grid).abs();
    let shape = PartialShape::biased(1.0, 0.5, 3, 4, 2, 8);
    let split = p.split_delta_biased(&shape, delta).unwrap();
    let coarse = simplex_grid_min(&p, &shape, delta, 200, 1);
    let zoomed = simplex_grid_min(&p, &shape, delta, 200, 4);
    let gap_biased = (split.radius - zoomed).abs();

    let mut mismatches = 0;
    let grid5 = [0.1, 0.2, 0.3, 0.4, 0.5];
    let intervals: Vec<(f64, f64)> = grid5
        .iter()
        .enumerate()
        .flat_map(|(i, &lo)| grid5[i..].iter().map(move |&hi| (lo, hi)))
        .collect();
    for n in 1..=5u32 {
        for code in 0..15usize.pow(n) {
            let (mut lcb, mut ucb, mut c) = (Vec::new(), Vec::new(), code);
            for _ in 0..n {
                lcb.push(intervals[c % 15].0);
                ucb.push(intervals[c % 15].1);
                c /= 15;
            }
            for k in 0..=n as usize {
                let mut sets = ArmSets::new(n as usize);
                update_arm_sets(&mut sets, k, |i| (lcb[i], ucb[i]));
                let got: Vec<ArmStatus> = (0..n as usize).map(|i| sets.status(i)).collect();
                if got != counting_oracle(&lcb, &ucb, k) {
                    mismatches += 1;
                }
            }
        }
    }

    let schedule_ok = sar_schedule(3, 100).unwrap() == rational_schedule(3, 100)
        && sar_schedule(2, 10).unwrap() == rational_schedule(2, 10)
        && sar_schedule(3, 100).unwrap() == vec![25, 37];
    let mu = [0.8, 0.6, 0.4, 0.2];
    let h2 = h2_complexity(&mu, 2).unwrap();
    use num_traits::ToPrimitive;
    let h2_ok = rel_err(h2, rational_h2(&mu, 2).to_f64().unwrap()) < 1e-12 && rel_err(h2, 75.0) < 1e-12;

    check(
        worst_radius < 1e-12
            && gap_unbiased <= 1e-8
            && split.radius <= coarse
            && gap_biased <= 1e-6
            && mismatches == 0
            && schedule_ok
            && h2_ok,
        format!(
            "radius rel err {worst_radius:.1e}; unbiased split gap {gap_unbiased:.1e}; biased split gap {gap_biased:.1e}; update_arm_sets mismatches {mismatches}; schedule exact {schedule_ok}; H2 exact {h2_ok}"
        ),
    )
}

/// Fraction of 10^4 paths on which the confidence bound ever fails.
fn lil_coverage() -> Outcome {
    let started = Instant::now();
    let p = LilParams::default();
    let (paths, steps, delta) = (10_000u64, 200u64, 0.05);
    let radii: Vec<f64> = (1..=steps).map(|tau| p.radius(1.0, tau, delta).unwrap().value).collect();
    let noise = rand_distr::Normal::new(0.0, gaussian_std(1.0)).unwrap();

    let mut single = 0;
    for path in 0..paths {
        let mut rng = ChaCha8Rng::seed_from_u64(path);
        let mut sum = 0.0;
        for tau in 1..=steps {
            sum += rng.sample(noise);
            if (sum / tau as f64).abs() > radii[tau as usize - 1] {
                single += 1;
                break;
            }
        }
    }

    // the unbiased partial-feedback estimator of one arm, delays 1..10
    let spec = ArmSpec::new(
        0.0,
        1.0,
        FeedbackModel::UnbiasedNoisy { sigma_p: 1.0 },
        DelayDist::UniformInt { lo: 1, hi: 10 },
    );
    let mut cache = SplitCache::new();
    let mut combined = 0;
    for path in 0..paths {
        let (mut t, mut f, mut full_sum, mut pull) = (0, 0u64, 0.0, 0u64);
        let mut violated = false;
        while t < steps && !violated {
            let r = sample_pull(&spec, 0, pull, &mut substream(path, 0, pull));
            pull += 1;
            let mut partial_sum = 0.0;
            for (j, &y) in r.partials.iter().enumerate() {
                if t == steps {
                    break;
                }
                t += 1;
                let observed = j as u64 + 1;
                if observed == r.delay {
                    break;
                }
                partial_sum += y;
                let shape = PartialShape::unbiased(1.0, 1.0, f + 1, observed, 1);
                let radius = cache.unbiased(&p, &shape, delta).radius;
                let estimate = (full_sum + partial_sum / observed as f64) / (f + 1) as f64;
                if estimate.abs() > radius {
                    violated = true;
                    break;
                }
            }
            f += 1;
            full_sum += r.full;
        }
        combined += u64::from(violated);
    }
    let (fs, fc) = (single as f64 / paths as f64, combined as f64 / paths as f64);
    let secs = started.elapsed().as_secs_f64();
    check(
        fs <= delta && fc <= delta && secs < 300.0,
        format!("violation frequency over 10^4 paths of 200 steps: single radius {fs:.4}, combined estimator {fc:.4} (limit {delta}, {secs:.1}s)"),
    )
}

/// Same config, same seed, same bytes, for every algorithm.
fn determinism() -> Outcome {
    let mut differing = Vec::new();
    for algorithm in Algorithm::ALL {
        let preset = match algorithm.family() {
            Family::Budget => "budget-free-means",
            _ if algorithm == Algorithm::RaceBiasedPf => "biased-free-means",
            _ => "free-means",
        };
        let mut c: ExperimentConfig = preset_config(preset, algorithm);
        c.runs = 20;
        c.master_seed = 8;
        let bytes = || {
            let mut buf = Vec::new();
            write_csv(&run_experiment(&c).unwrap(), &mut buf).unwrap();
            buf
        };
        if bytes() != bytes() {
            differing.push(algorithm.name());
        }
    }
    check(
        differing.is_empty(),
        format!("20-run CSVs re-run with the same seed, differing: {differing:?}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, confidence),
        (2, never_worse),
        (3, batch_reduction),
        (4, budget_audit),
        (5, misid_bound),
        (6, oracles),
        (7, lil_coverage),
        (8, determinism),
    ];
    let mut failed = Vec::new();
    for (id, criterion) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("criterion {id} PASS: {detail}"),
            Err(detail) => {
                println!("criterion {id} FAIL: {detail}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
