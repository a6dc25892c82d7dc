//! Per-arm bound selection shared by the sequential and batch racers.

use super::{estimator_biased, estimator_unbiased, ArmStats, Racer};
use crate::lil::{LilParams, PartialShape, SplitCache};
use crate::model::ProblemInstance;

pub(crate) struct Bounder {
    params: LilParams,
    cache: SplitCache,
    delta: f64,
    arms: usize,
    scales: Vec<(f64, f64)>,
    racer: Racer,
}

impl Bounder {
    pub(crate) fn new(instance: &ProblemInstance, racer: Racer, params: LilParams) -> Self {
        Bounder {
            params,
            cache: SplitCache::new(),
            delta: instance.delta(),
            arms: instance.n(),
            scales: instance
                .arms()
                .iter()
                .map(|a| (a.sigma, a.feedback.sigma_p()))
                .collect(),
            racer,
        }
    }

    fn per_arm(&self) -> f64 {
        self.delta / self.arms as f64
    }

    /// Estimate and radius from completed pulls alone.
    fn full_only(&self, arm: usize, stats: &ArmStats) -> (f64, f64) {
        match stats.full_mean() {
            Some(mu) => {
                let r = self
                    .params
                    .radius_value(self.scales[arm].0, stats.full_count, self.per_arm());
                (mu, r)
            }
            None => (0.0, f64::INFINITY),
        }
    }

    /// Estimate and radius mixing in the in-flight pull's partials, when
    /// available and possibly tighter than `beat`.
    fn combined(&mut self, arm: usize, stats: &ArmStats, beat: f64) -> Option<(f64, f64)> {
        let (sigma, sigma_p) = self.scales[arm];
        let f = stats.full_count + 1;
        let p = stats.partial_count;
        if p == 0 {
            return None;
        }
        let per_arm = self.per_arm();
        // Each share is at most delta, so these are lower bounds on the
        // combined radius for any split.
        let r_full = self.params.radius_value(sigma, f, per_arm);
        let r_partial = self.params.radius_value(sigma_p, p, per_arm);
        match self.racer {
            Racer::FullDf => None,
            Racer::UnbiasedPf => {
                if r_full + r_partial / f as f64 >= beat {
                    return None;
                }
                let shape = PartialShape::unbiased(sigma, sigma_p, f, p, self.arms);
                let split = self.cache.unbiased(&self.params, &shape, self.delta);
                let mu = estimator_unbiased(stats).expect("P >= 1");
                Some((mu, split.radius))
            }
            Racer::BiasedPf => {
                if stats.full_count == 0 || stats.bias_count == 0 {
                    return None;
                }
                let r_bias = self.params.radius_value(sigma_p, stats.bias_count, per_arm);
                if r_full + (r_partial + r_bias) / f as f64 >= beat {
                    return None;
                }
                let shape =
                    PartialShape::biased(sigma, sigma_p, f, p, stats.bias_count, self.arms);
                let split = self.cache.biased(&self.params, &shape, self.delta);
                let mu = estimator_biased(stats).expect("F, F_b, P >= 1");
                Some((mu, split.radius))
            }
        }
    }

    /// Recomputes the arm's estimate as the candidate with the smaller
    /// radius; the full-only estimate wins ties.
    pub(crate) fn refresh(&mut self, arm: usize, stats: &mut ArmStats) {
        let (mu_full, r_full) = self.full_only(arm, stats);
        let (mu, r) = match self.combined(arm, stats, r_full) {
            Some((mu_c, r_c)) if r_c < r_full => (mu_c, r_c),
            _ => (mu_full, r_full),
        };
        debug_assert!(r <= r_full);
        stats.set_estimate(mu, r);
    }
}
