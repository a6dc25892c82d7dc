//! One pull at a time: the full-feedback baseline and the partial-feedback
//! racers.

use super::{least_pulled, update_arm_sets, ArmSets, ArmStats, Bounder, PullRecord, Racer, RunResult};
use crate::error::Result;
use crate::lil::LilParams;
use crate::model::{realize, ProblemInstance, PullRealization};

/// Racing on completed pulls only.
pub fn race_full_df(instance: &ProblemInstance, seed: u64) -> RunResult {
    run(instance, seed, Racer::FullDf, LilParams::default())
}

/// Racing that also uses the unbiased partial feedback of the in-flight pull.
pub fn race_unbiased_pf(instance: &ProblemInstance, seed: u64) -> Result<RunResult> {
    race(instance, seed, Racer::UnbiasedPf, LilParams::default())
}

/// Racing on biased partial feedback, corrected by the bias estimated from
/// completed pulls.
pub fn race_biased_pf(instance: &ProblemInstance, seed: u64) -> Result<RunResult> {
    race(instance, seed, Racer::BiasedPf, LilParams::default())
}

/// Sequential racing with explicit LIL constants.
pub fn race(instance: &ProblemInstance, seed: u64, racer: Racer, lil: LilParams) -> Result<RunResult> {
    racer.check_feedback(instance)?;
    Ok(run(instance, seed, racer, lil))
}

struct InFlight {
    pull: PullRealization,
    start: u64,
    observed: u64,
}

impl InFlight {
    fn record(&self, end: u64, completed: bool) -> PullRecord {
        PullRecord {
            arm: self.pull.arm,
            pull_index: self.pull.pull_index,
            start: self.start,
            end,
            delay: self.pull.delay,
            observed: self.observed,
            completed,
        }
    }
}

fn run(instance: &ProblemInstance, seed: u64, racer: Racer, lil: LilParams) -> RunResult {
    let n = instance.n();
    let k = instance.k();
    let mut bounder = Bounder::new(instance, racer, lil);
    let mut stats = vec![ArmStats::new(); n];
    let mut sets = ArmSets::new(n);
    let mut pulls = vec![0u64; n];
    let mut trace = Vec::new();
    let mut current: Option<InFlight> = None;
    let mut t = 0u64;

    while !sets.is_done() {
        let cur = current.get_or_insert_with(|| {
            let arm = least_pulled(&sets, &stats);
            let pull = realize(instance, seed, arm, pulls[arm]);
            pulls[arm] += 1;
            stats[arm].partial_count = 0;
            stats[arm].partial_sum = 0.0;
            InFlight {
                pull,
                start: t,
                observed: 0,
            }
        });
        let arm = cur.pull.arm;
        let s = &mut stats[arm];

        if racer == Racer::FullDf {
            // Nothing but the final partial is used, so skip to it.
            t += cur.pull.delay - cur.observed;
            cur.observed = cur.pull.delay;
        } else {
            t += 1;
            cur.observed += 1;
        }

        let completed = cur.observed == cur.pull.delay;
        if completed {
            let intermediates = if racer == Racer::FullDf {
                (0.0, 0)
            } else {
                (s.partial_sum, s.partial_count)
            };
            s.record_full(cur.pull.full, intermediates);
            s.partial_count = 0;
            s.partial_sum = 0.0;
        } else {
            s.partial_count += 1;
            s.partial_sum += cur.pull.partials[(cur.observed - 1) as usize];
        }
        bounder.refresh(arm, s);
        update_arm_sets(&mut sets, k, |i| (stats[i].lcb, stats[i].ucb));

        if completed || !sets.is_surviving(arm) {
            trace.push(cur.record(t, completed));
            current = None;
        }
    }
    RunResult::finish(sets, &instance.top_k(), t, pulls, seed, trace)
}
