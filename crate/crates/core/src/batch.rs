//! Racing with up to `b` pulls in flight, at most `r` of them on one arm.

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Result};
use crate::lil::LilParams;
use crate::model::{realize, ProblemInstance, PullRealization};
use crate::racing::{update_arm_sets, ArmSets, ArmStats, Bounder, PullRecord, Racer, RunResult};

/// Capacity limits of a batch run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchConfig {
    /// Pulls in flight at once.
    pub b: usize,
    /// Pulls in flight on one arm.
    pub r: usize,
    /// Free the slots of an eliminated arm's pulls right away.
    #[serde(default)]
    pub cancel_on_elimination: bool,
}

impl BatchConfig {
    pub fn new(b: usize, r: usize) -> Self {
        BatchConfig {
            b,
            r,
            cancel_on_elimination: false,
        }
    }

    pub fn with_cancel(mut self, cancel: bool) -> Self {
        self.cancel_on_elimination = cancel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 || self.r == 0 {
            return Err(out_of_range(
                "b, r",
                format!("need b >= 1 and r >= 1, got b={} r={}", self.b, self.r),
            ));
        }
        Ok(())
    }
}

/// Partial-feedback model for [`batch_race_pf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialModel {
    Unbiased,
    Biased,
}

/// Assigns up to `e` free slots, each to the surviving arm below its
/// per-arm cap with the fewest pulls so far (lowest index on ties).
/// Updates `pulls` and `in_flight` and returns the new pulls per arm.
pub fn get_batch_arms(
    surviving: &[usize],
    pulls: &mut [u64],
    in_flight: &mut [usize],
    e: usize,
    r: usize,
) -> Vec<usize> {
    let mut m = vec![0; pulls.len()];
    for _ in 0..e {
        let Some(&j) = surviving
            .iter()
            .filter(|&&j| in_flight[j] < r)
            .min_by_key(|&&j| (pulls[j], j))
        else {
            break;
        };
        pulls[j] += 1;
        in_flight[j] += 1;
        m[j] += 1;
    }
    m
}

/// Batch racing on completed pulls only.
pub fn batch_race_full_df(
    instance: &ProblemInstance,
    config: BatchConfig,
    seed: u64,
) -> Result<RunResult> {
    batch_race(instance, config, seed, Racer::FullDf, LilParams::default())
}

/// Batch racing that also uses partial feedback. Per arm, only the in-flight
/// pull with the most partials feeds the combined estimator.
pub fn batch_race_pf(
    instance: &ProblemInstance,
    config: BatchConfig,
    seed: u64,
    model: PartialModel,
) -> Result<RunResult> {
    let racer = match model {
        PartialModel::Unbiased => Racer::UnbiasedPf,
        PartialModel::Biased => Racer::BiasedPf,
    };
    batch_race(instance, config, seed, racer, LilParams::default())
}

/// Batch racing with explicit LIL constants.
pub fn batch_race(
    instance: &ProblemInstance,
    config: BatchConfig,
    seed: u64,
    racer: Racer,
    lil: LilParams,
) -> Result<RunResult> {
    config.validate()?;
    racer.check_feedback(instance)?;
    Ok(run(instance, config, seed, racer, lil))
}

struct Pull {
    realization: PullRealization,
    start: u64,
    observed: u64,
    partial_sum: f64,
}

impl Pull {
    fn record(&self, end: u64, completed: bool) -> PullRecord {
        PullRecord {
            arm: self.realization.arm,
            pull_index: self.realization.pull_index,
            start: self.start,
            end,
            delay: self.realization.delay,
            observed: self.observed,
            completed,
        }
    }
}

fn run(
    instance: &ProblemInstance,
    config: BatchConfig,
    seed: u64,
    racer: Racer,
    lil: LilParams,
) -> RunResult {
    let n = instance.n();
    let k = instance.k();
    let mut bounder = Bounder::new(instance, racer, lil);
    let mut stats = vec![ArmStats::new(); n];
    let mut sets = ArmSets::new(n);
    let mut pulls = vec![0u64; n];
    let mut in_flight = vec![0usize; n];
    // launch order; older pulls first
    let mut pending: Vec<Pull> = Vec::new();
    let mut trace = Vec::new();
    let mut touched = vec![false; n];
    let mut t = 0u64;

    loop {
        if t > 0 {
            touched.iter_mut().for_each(|x| *x = false);
            let mut still = Vec::with_capacity(pending.len());
            for mut p in pending.drain(..) {
                p.observed += 1;
                let arm = p.realization.arm;
                touched[arm] = true;
                if p.observed == p.realization.delay {
                    let intermediates = if racer == Racer::FullDf {
                        (0.0, 0)
                    } else {
                        (p.partial_sum, p.observed - 1)
                    };
                    stats[arm].record_full(p.realization.full, intermediates);
                    in_flight[arm] -= 1;
                    trace.push(p.record(t, true));
                } else {
                    p.partial_sum += p.realization.partials[(p.observed - 1) as usize];
                    still.push(p);
                }
            }
            pending = still;

            if touched.iter().any(|&x| x) {
                for arm in (0..n).filter(|&a| touched[a]) {
                    let s = &mut stats[arm];
                    // The oldest pull has seen the most partials.
                    match pending.iter().find(|p| p.realization.arm == arm) {
                        Some(lead) if racer != Racer::FullDf => {
                            s.partial_count = lead.observed;
                            s.partial_sum = lead.partial_sum;
                        }
                        _ => {
                            s.partial_count = 0;
                            s.partial_sum = 0.0;
                        }
                    }
                    bounder.refresh(arm, s);
                }
                update_arm_sets(&mut sets, k, |i| (stats[i].lcb, stats[i].ucb));
            }
        }
        if sets.is_done() {
            break;
        }
        if config.cancel_on_elimination {
            pending.retain(|p| {
                let arm = p.realization.arm;
                if sets.is_surviving(arm) {
                    true
                } else {
                    in_flight[arm] -= 1;
                    trace.push(p.record(t, false));
                    false
                }
            });
        }

        let running = pending.len();
        debug_assert!(running <= config.b);
        let before = pulls.clone();
        let m = get_batch_arms(&sets.surviving, &mut pulls, &mut in_flight, config.b - running, config.r);
        for (arm, &count) in m.iter().enumerate() {
            for j in 0..count as u64 {
                pending.push(Pull {
                    realization: realize(instance, seed, arm, before[arm] + j),
                    start: t,
                    observed: 0,
                    partial_sum: 0.0,
                });
            }
        }
        debug_assert!(in_flight.iter().all(|&a| a <= config.r));
        t += 1;
    }
    for p in &pending {
        trace.push(p.record(t, false));
    }
    RunResult::finish(sets, &instance.top_k(), t, pulls, seed, trace)
}
