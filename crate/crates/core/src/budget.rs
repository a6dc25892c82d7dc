//! Fixed-budget top-k identification by successive accepts and rejects.

use crate::error::{out_of_range, Error, Result};
use crate::model::{realize, ProblemInstance};
use crate::racing::{ArmSets, ArmStatus, PullRecord, RunResult};

/// `1/2 + sum_{i=2}^n 1/i`.
pub fn log_bar(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(out_of_range("n", format!("need n >= 2, got {n}")));
    }
    Ok(0.5 + (2..=n).rev().map(|i| 1.0 / i as f64).sum::<f64>())
}

/// Ceiling that ignores rounding noise just above an integer.
fn snapped_ceil(q: f64) -> f64 {
    let r = q.round();
    if (q - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        q.ceil()
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `log_bar(n)` as a reduced fraction, or `None` once it overflows `u128`.
fn log_bar_ratio(n: usize) -> Option<(u128, u128)> {
    let (mut num, mut den) = (1u128, 2u128);
    for i in 2..=n as u128 {
        let lcm = den.checked_mul(i / gcd(den, i))?;
        num = num.checked_mul(lcm / den)?.checked_add(lcm / i)?;
        den = lcm;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    Some((num, den))
}

/// `ceil(spare / (log_bar(n) * m))`; exact unless the fraction overflows,
/// which needs far more arms than the budget algorithms are run with.
fn ceil_over_log_bar(spare: u64, n: usize, m: u64) -> Result<u64> {
    if let Some((num, den)) = log_bar_ratio(n) {
        if let (Some(a), Some(b)) = (u128::from(spare).checked_mul(den), num.checked_mul(u128::from(m))) {
            return Ok(a.div_ceil(b) as u64);
        }
    }
    let lb = log_bar(n)?;
    Ok(snapped_ceil(spare as f64 / (lb * m as f64)) as u64)
}

/// Cumulative per-arm pull counts `t_1..t_{n-1}` (`t_0 = 0` is implied).
pub fn sar_schedule(n: usize, t_max: u64) -> Result<Vec<u64>> {
    log_bar(n)?;
    if t_max <= n as u64 {
        return Err(out_of_range("T_max", format!("need T_max > n = {n}, got {t_max}")));
    }
    let spare = t_max - n as u64;
    (1..n).map(|p| ceil_over_log_bar(spare, n, (n + 1 - p) as u64)).collect()
}

/// Per-arm pulls of the current phase before the delay budget is applied:
/// `floor(ceil((T_avail - n_p) / (n_p logbar(n_p))) / D_max)`, and 0 once the
/// remaining budget does not exceed `n_p`.
pub fn sarfulldf_phase_target(t_avail: u64, n_p: usize, d_max: u64) -> Result<u64> {
    log_bar(n_p)?;
    if d_max == 0 {
        return Err(out_of_range("D_max", "need D_max >= 1"));
    }
    if t_avail <= n_p as u64 {
        return Ok(0);
    }
    let per_arm = ceil_over_log_bar(t_avail - n_p as u64, n_p, n_p as u64)?;
    Ok(per_arm / d_max)
}

/// Gaps of descending empirical means relative to the `k'`-boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    pub sorted_means: Vec<f64>,
    pub k_prime: usize,
    pub gaps: Vec<f64>,
}

impl GapProfile {
    /// Zero-based sorted position with the largest gap, lowest on ties.
    pub fn eliminated(&self) -> usize {
        let mut best = 0;
        for (i, &g) in self.gaps.iter().enumerate() {
            if g > self.gaps[best] {
                best = i;
            }
        }
        best
    }

    /// Whether the arm at zero-based sorted position `pos` is accepted.
    pub fn accepts(&self, pos: usize) -> bool {
        pos < self.k_prime
    }
}

pub fn empirical_gaps(sorted_means: &[f64], k_prime: usize) -> Result<GapProfile> {
    let n = sorted_means.len();
    if k_prime == 0 || k_prime >= n {
        return Err(out_of_range(
            "k'",
            format!("need 1 <= k' < {n}, got {k_prime}"),
        ));
    }
    let upper = sorted_means[k_prime - 1];
    let lower = sorted_means[k_prime];
    let gaps = sorted_means
        .iter()
        .enumerate()
        .map(|(i, &m)| if i < k_prime { m - lower } else { upper - m })
        .collect();
    Ok(GapProfile {
        sorted_means: sorted_means.to_vec(),
        k_prime,
        gaps,
    })
}

/// `max_i i / Delta_i^2` over the true means.
pub fn h2_complexity(means: &[f64], k: usize) -> Result<f64> {
    let mut sorted = means.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInstance("H2 needs distinct means".into()));
    }
    let profile = empirical_gaps(&sorted, k)?;
    Ok(profile
        .gaps
        .iter()
        .enumerate()
        .map(|(i, g)| (i + 1) as f64 / (g * g))
        .fold(0.0, f64::max))
}

/// `2 n^2 exp(-(T_max - n) / (8 logbar(n) H2))`, not clamped to 1.
pub fn misid_upper_bound(n: usize, t_max: u64, h2: f64) -> Result<f64> {
    let lb = log_bar(n)?;
    if t_max <= n as u64 {
        return Err(out_of_range("T_max", format!("need T_max > n = {n}, got {t_max}")));
    }
    let nf = n as f64;
    Ok(2.0 * nf * nf * (-((t_max - n as u64) as f64) / (8.0 * lb * h2)).exp())
}

/// How a phase's pulls are charged against the budget.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Cost {
    Unit,
    Delay,
}

struct Phased<'a> {
    instance: &'a ProblemInstance,
    seed: u64,
    cost: Cost,
    sums: Vec<f64>,
    pulls: Vec<u64>,
    sets: ArmSets,
    consumed: u64,
    trace: Vec<PullRecord>,
}

impl<'a> Phased<'a> {
    fn new(instance: &'a ProblemInstance, seed: u64, cost: Cost) -> Self {
        let n = instance.n();
        Phased {
            instance,
            seed,
            cost,
            sums: vec![0.0; n],
            pulls: vec![0; n],
            sets: ArmSets::new(n),
            consumed: 0,
            trace: Vec::new(),
        }
    }

    fn k_prime(&self) -> usize {
        self.sets.remaining(self.instance.k())
    }

    /// Settles every survivor when `k'` is 0 or `|S|`; returns whether it did.
    fn exit_if_settled(&mut self) -> bool {
        let k_prime = self.k_prime();
        let s = self.sets.surviving.len();
        if k_prime != 0 && k_prime != s {
            return false;
        }
        let status = if k_prime == 0 {
            ArmStatus::Rejected
        } else {
            ArmStatus::Accepted
        };
        for arm in std::mem::take(&mut self.sets.surviving) {
            self.sets.settle(arm, status);
        }
        true
    }

    /// Pulls each survivor `m` times, one pull at a time.
    fn pull_survivors(&mut self, m: u64) {
        let survivors = self.sets.surviving.clone();
        for _ in 0..m {
            for &arm in &survivors {
                let pull = realize(self.instance, self.seed, arm, self.pulls[arm]);
                let cost = match self.cost {
                    Cost::Unit => 1,
                    Cost::Delay => pull.delay,
                };
                self.trace.push(PullRecord {
                    arm,
                    pull_index: self.pulls[arm],
                    start: self.consumed,
                    end: self.consumed + cost,
                    delay: pull.delay,
                    observed: pull.delay,
                    completed: true,
                });
                self.consumed += cost;
                self.sums[arm] += pull.full;
                self.pulls[arm] += 1;
            }
        }
    }

    /// Moves the survivor with the largest empirical gap to A or R.
    fn eliminate(&mut self) {
        let mut order = self.sets.surviving.clone();
        let mean = |i: usize| {
            if self.pulls[i] == 0 {
                0.0
            } else {
                self.sums[i] / self.pulls[i] as f64
            }
        };
        order.sort_by(|&a, &b| mean(b).total_cmp(&mean(a)).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| mean(i)).collect();
        let profile = empirical_gaps(&sorted, self.k_prime()).expect("1 <= k' < |S|");
        let pos = profile.eliminated();
        let arm = order[pos];
        self.sets.surviving.retain(|&i| i != arm);
        let status = if profile.accepts(pos) {
            ArmStatus::Accepted
        } else {
            ArmStatus::Rejected
        };
        self.sets.settle(arm, status);
    }

    fn finish(self) -> RunResult {
        let top = self.instance.top_k();
        RunResult::finish(self.sets, &top, self.consumed, self.pulls, self.seed, self.trace)
    }
}

/// Successive accepts and rejects with unit-cost pulls (delays ignored).
pub fn sar(instance: &ProblemInstance, t_max: u64, seed: u64) -> Result<RunResult> {
    let schedule = sar_schedule(instance.n(), t_max)?;
    let mut run = Phased::new(instance, seed, Cost::Unit);
    let mut prev = 0;
    for &t_p in &schedule {
        if run.exit_if_settled() {
            break;
        }
        run.pull_survivors(t_p - prev);
        prev = t_p;
        run.eliminate();
    }
    run.exit_if_settled();
    Ok(run.finish())
}

/// Pulls per survivor that fit in `t_avail` if every pull takes `d_max`.
fn guarded(m: u64, n_p: usize, d_max: u64, t_avail: u64) -> u64 {
    let worst = n_p as u64 * d_max;
    if m.saturating_mul(worst) > t_avail {
        t_avail / worst
    } else {
        m
    }
}

/// SAR under delayed feedback. Each phase restarts SAR on the residual
/// problem: survivors are pulled as often as SAR's first phase would pull
/// them given the time actually left, budgeting every pull at `D_max`.
pub fn sar_full_df(instance: &ProblemInstance, t_max: u64, seed: u64) -> Result<RunResult> {
    check_budget(instance, t_max)?;
    let d_max = instance.d_max();
    let mut run = Phased::new(instance, seed, Cost::Delay);
    for _ in 1..instance.n() {
        if run.exit_if_settled() {
            break;
        }
        let n_p = run.sets.surviving.len();
        let t_avail = t_max - run.consumed;
        let m = sarfulldf_phase_target(t_avail, n_p, d_max)?.max(1);
        run.pull_survivors(guarded(m, n_p, d_max, t_avail));
        run.eliminate();
    }
    run.exit_if_settled();
    Ok(run.finish())
}

/// SAR's static schedule with every pull budgeted at `D_max`.
pub fn sar_naive_df(instance: &ProblemInstance, t_max: u64, seed: u64) -> Result<RunResult> {
    check_budget(instance, t_max)?;
    let d_max = instance.d_max();
    let schedule = sar_schedule(instance.n(), t_max)?;
    let mut run = Phased::new(instance, seed, Cost::Delay);
    let mut prev = 0;
    for &t_p in &schedule {
        if run.exit_if_settled() {
            break;
        }
        let n_p = run.sets.surviving.len();
        let mut m = (t_p - prev) / d_max;
        if t_p > prev {
            m = m.max(1);
        }
        prev = t_p;
        run.pull_survivors(guarded(m, n_p, d_max, t_max - run.consumed));
        run.eliminate();
    }
    run.exit_if_settled();
    Ok(run.finish())
}

fn check_budget(instance: &ProblemInstance, t_max: u64) -> Result<()> {
    if t_max <= instance.n() as u64 {
        return Err(out_of_range(
            "T_max",
            format!("need T_max > n = {}, got {t_max}", instance.n()),
        ));
    }
    Ok(())
}
