//! Fixed-confidence racing: arm bookkeeping, the accept/reject rule and the
//! sequential racers.

mod bounds;
mod sequential;

pub(crate) use bounds::Bounder;
pub use sequential::{race, race_biased_pf, race_full_df, race_unbiased_pf};

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::model::{FeedbackModel, ProblemInstance};

/// Which estimators a racer may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Racer {
    /// Completed pulls only.
    FullDf,
    /// Completed pulls plus unbiased partial feedback.
    UnbiasedPf,
    /// Completed pulls plus bias-corrected partial feedback.
    BiasedPf,
}

impl Racer {
    /// Checks that every arm produces the feedback this racer expects.
    pub fn check_feedback(self, instance: &ProblemInstance) -> Result<()> {
        let (name, ok): (&str, fn(&FeedbackModel) -> bool) = match self {
            Racer::FullDf => return Ok(()),
            Racer::UnbiasedPf => ("unbiased noisy", |f| {
                matches!(f, FeedbackModel::UnbiasedNoisy { .. })
            }),
            Racer::BiasedPf => ("biased noisy", |f| {
                matches!(f, FeedbackModel::BiasedNoisy { .. })
            }),
        };
        match instance.arms().iter().position(|a| !ok(&a.feedback)) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidFeedback(format!(
                "arm {i} has {:?}, the racer needs {name} feedback",
                instance.arms()[i].feedback
            ))),
        }
    }
}

/// Per-arm sufficient statistics and current confidence bounds.
///
/// `partial_count` and `partial_sum` describe the in-flight pull whose
/// partial feedback currently feeds the combined estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats {
    /// F: completed pulls.
    pub full_count: u64,
    pub full_sum: f64,
    /// P: partials observed on the in-flight pull.
    pub partial_count: u64,
    pub partial_sum: f64,
    /// F_b: completed pulls with at least one intermediate partial.
    pub bias_count: u64,
    /// Sum over those pulls of (mean intermediate partial - full feedback).
    pub bias_sum: f64,
    pub mu_hat: f64,
    pub radius: f64,
    pub lcb: f64,
    pub ucb: f64,
}

impl Default for ArmStats {
    fn default() -> Self {
        ArmStats {
            full_count: 0,
            full_sum: 0.0,
            partial_count: 0,
            partial_sum: 0.0,
            bias_count: 0,
            bias_sum: 0.0,
            mu_hat: 0.0,
            radius: f64::INFINITY,
            lcb: f64::NEG_INFINITY,
            ucb: f64::INFINITY,
        }
    }
}

impl ArmStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in a completed pull. `intermediates` is the sum and count of
    /// the partials observed strictly before the full feedback.
    pub fn record_full(&mut self, x: f64, intermediates: (f64, u64)) {
        self.full_count += 1;
        self.full_sum += x;
        let (sum, count) = intermediates;
        if count > 0 {
            self.bias_count += 1;
            self.bias_sum += sum / count as f64 - x;
        }
    }

    /// Sets the estimate and radius and derives the bounds from them.
    pub fn set_estimate(&mut self, mu_hat: f64, radius: f64) {
        self.mu_hat = mu_hat;
        self.radius = radius;
        if radius.is_finite() {
            self.lcb = mu_hat - radius;
            self.ucb = mu_hat + radius;
        } else {
            self.lcb = f64::NEG_INFINITY;
            self.ucb = f64::INFINITY;
        }
    }

    /// Mean of the completed pulls, if any.
    pub fn full_mean(&self) -> Option<f64> {
        (self.full_count > 0).then(|| self.full_sum / self.full_count as f64)
    }

    /// Estimated bias Z, if any bias sample exists.
    pub fn bias_estimate(&self) -> Option<f64> {
        (self.bias_count > 0).then(|| self.bias_sum / self.bias_count as f64)
    }
}

/// Mean estimate from the completed pulls plus the partial mean of the
/// in-flight pull, which counts as one more pull.
pub fn estimator_unbiased(stats: &ArmStats) -> Result<f64> {
    if stats.partial_count == 0 {
        return Err(out_of_range("P", "the estimator needs at least one partial"));
    }
    let partial_mean = stats.partial_sum / stats.partial_count as f64;
    Ok((stats.full_sum + partial_mean) / (stats.full_count + 1) as f64)
}

/// As [`estimator_unbiased`] with the partials shifted by the estimated bias.
pub fn estimator_biased(stats: &ArmStats) -> Result<f64> {
    if stats.partial_count == 0 {
        return Err(out_of_range("P", "the estimator needs at least one partial"));
    }
    if stats.full_count == 0 {
        return Err(out_of_range("F", "the bias-corrected estimator needs F >= 1"));
    }
    let z = stats
        .bias_estimate()
        .ok_or_else(|| out_of_range("F_b", "no bias sample available"))?;
    let p = stats.partial_count as f64;
    let corrected = (stats.partial_sum - p * z) / p;
    Ok((stats.full_sum + corrected) / (stats.full_count + 1) as f64)
}

/// The `m`-th largest value, with `+inf` for `m == 0` and `-inf` when fewer
/// than `m` values exist.
pub fn order_stat_max(values: &[f64], m: usize) -> f64 {
    let mut scratch = values.to_vec();
    order_stat_in_place(&mut scratch, m)
}

fn order_stat_in_place(values: &mut [f64], m: usize) -> f64 {
    if m == 0 {
        return f64::INFINITY;
    }
    if m > values.len() {
        return f64::NEG_INFINITY;
    }
    let idx = m - 1;
    let (_, nth, _) = values.select_nth_unstable_by(idx, |a, b| b.total_cmp(a));
    *nth
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmStatus {
    Surviving,
    Accepted,
    Rejected,
}

/// The accepted, rejected and surviving arms. `surviving` stays in
/// ascending index order; the other two keep the order of decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSets {
    pub accepted: Vec<usize>,
    pub rejected: Vec<usize>,
    pub surviving: Vec<usize>,
    status: Vec<ArmStatus>,
}

impl ArmSets {
    pub fn new(n: usize) -> Self {
        ArmSets {
            accepted: Vec::new(),
            rejected: Vec::new(),
            surviving: (0..n).collect(),
            status: vec![ArmStatus::Surviving; n],
        }
    }

    pub fn status(&self, arm: usize) -> ArmStatus {
        self.status[arm]
    }

    pub fn is_surviving(&self, arm: usize) -> bool {
        self.status[arm] == ArmStatus::Surviving
    }

    pub fn is_done(&self) -> bool {
        self.surviving.is_empty()
    }

    /// Records a decision for an arm already removed from `surviving`.
    pub(crate) fn settle(&mut self, arm: usize, status: ArmStatus) {
        debug_assert!(!self.surviving.contains(&arm));
        match status {
            ArmStatus::Accepted => self.accepted.push(arm),
            ArmStatus::Rejected => self.rejected.push(arm),
            ArmStatus::Surviving => unreachable!("settle needs a decision"),
        }
        self.status[arm] = status;
    }

    /// Arms still to be accepted, `k - |A|`.
    pub fn remaining(&self, k: usize) -> usize {
        k.saturating_sub(self.accepted.len())
    }
}

/// Moves surviving arms whose bounds separate them from the rest.
///
/// Both rules read one snapshot of `bounds(i) = (lcb_i, ucb_i)` and one value
/// of `k_t = k - |A|`. Returns whether any arm moved.
pub fn update_arm_sets<B>(sets: &mut ArmSets, k: usize, bounds: B) -> bool
where
    B: Fn(usize) -> (f64, f64),
{
    if sets.surviving.is_empty() {
        return false;
    }
    let k_t = sets.remaining(k);
    let snapshot: Vec<(f64, f64)> = sets.surviving.iter().map(|&i| bounds(i)).collect();
    let mut scratch: Vec<f64> = snapshot.iter().map(|b| b.1).collect();
    let accept_above = order_stat_in_place(&mut scratch, k_t + 1);
    scratch.clear();
    scratch.extend(snapshot.iter().map(|b| b.0));
    let reject_below = order_stat_in_place(&mut scratch, k_t);

    let mut moved = false;
    let mut keep = Vec::with_capacity(sets.surviving.len());
    for (pos, &i) in sets.surviving.iter().enumerate() {
        let (lcb, ucb) = snapshot[pos];
        if lcb > accept_above {
            sets.accepted.push(i);
            sets.status[i] = ArmStatus::Accepted;
            moved = true;
        } else if ucb < reject_below {
            sets.rejected.push(i);
            sets.status[i] = ArmStatus::Rejected;
            moved = true;
        } else {
            keep.push(i);
        }
    }
    sets.surviving = keep;
    moved
}

/// One pull as seen by a racer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullRecord {
    pub arm: usize,
    pub pull_index: u64,
    pub start: u64,
    /// Completion time, or the time the pull was abandoned.
    pub end: u64,
    pub delay: u64,
    /// Partials observed, the full feedback included.
    pub observed: u64,
    pub completed: bool,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Accepted arms, ascending.
    pub accepted: Vec<usize>,
    /// Rejected arms, ascending.
    pub rejected: Vec<usize>,
    /// Time steps elapsed until termination.
    pub delayed_sample_complexity: u64,
    /// Pulls started on each arm, abandoned ones included.
    pub pulls_per_arm: Vec<u64>,
    pub correct: bool,
    pub seed: u64,
    pub trace: Vec<PullRecord>,
}

impl RunResult {
    pub(crate) fn finish(
        sets: ArmSets,
        top_k: &[usize],
        t: u64,
        pulls_per_arm: Vec<u64>,
        seed: u64,
        trace: Vec<PullRecord>,
    ) -> Self {
        let mut accepted = sets.accepted;
        accepted.sort_unstable();
        let mut rejected = sets.rejected;
        rejected.sort_unstable();
        let correct = accepted == top_k;
        RunResult {
            accepted,
            rejected,
            delayed_sample_complexity: t,
            pulls_per_arm,
            correct,
            seed,
            trace,
        }
    }
}

/// Surviving arm with the fewest completed pulls, lowest index on ties.
pub(crate) fn least_pulled(sets: &ArmSets, stats: &[ArmStats]) -> usize {
    *sets
        .surviving
        .iter()
        .min_by_key(|&&i| (stats[i].full_count, i))
        .expect("called with a surviving arm")
}
