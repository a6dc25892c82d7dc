//! Arm, delay and feedback specifications, plus the seeded sampler that turns
//! them into pull realizations.
//!
//! Scale parameters (`sigma`, `sigma_p`) are sub-Gaussian scales in the
//! normalisation used by the LIL confidence radius in [`crate::lil`]: a scale
//! of `s` bounds a zero-mean variable that is at most as heavy-tailed as a
//! Gaussian with standard deviation `s / 2`. The sampler therefore draws
//! Gaussian noise with standard deviation [`gaussian_std`]`(s) = s / 2`.
//!
//! Every pull is sampled from its own ChaCha stream keyed by
//! `(master_seed, arm, pull_index)`, so the f-th pull of arm i is the same
//! realization in every algorithm that shares the master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random stream used to sample one pull.
pub type PullStream = ChaCha8Rng;

/// Standard deviation of the Gaussian used for a sub-Gaussian scale `scale`.
#[inline]
pub fn gaussian_std(scale: f64) -> f64 {
    0.5 * scale
}

/// Distribution of the number of time steps a pull takes to complete.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayDist {
    Constant { d: u64 },
    UniformInt { lo: u64, hi: u64 },
    /// `1 + Geometric(p)` failures, with all mass above `cap` moved onto `cap`.
    TruncGeometric { p: f64, cap: u64 },
}

impl DelayDist {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DelayDist::Constant { d } if d < 1 => {
                Err(Error::InvalidDelay(format!("constant delay must be >= 1, got {d}")))
            }
            DelayDist::UniformInt { lo, hi } if lo < 1 || hi < lo => Err(Error::InvalidDelay(
                format!("uniform delay needs 1 <= lo <= hi, got lo={lo} hi={hi}"),
            )),
            DelayDist::TruncGeometric { p, cap } if !(p > 0.0 && p <= 1.0) || cap < 1 => {
                Err(Error::InvalidDelay(format!(
                    "truncated geometric needs 0 < p <= 1 and cap >= 1, got p={p} cap={cap}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Largest delay this distribution can produce.
    pub fn d_max(&self) -> u64 {
        match *self {
            DelayDist::Constant { d } => d,
            DelayDist::UniformInt { hi, .. } => hi,
            DelayDist::TruncGeometric { cap, .. } => cap,
        }
    }
}

/// How partial feedback relates to the final (full) feedback of a pull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeedbackModel {
    /// Zeros until the last step, which carries the full feedback.
    FullDelayed,
    /// Independent increments that sum to the full feedback.
    Incremental,
    /// Intermediate partials are the full feedback plus zero-mean noise.
    UnbiasedNoisy { sigma_p: f64 },
    /// Intermediate partials are the full feedback plus `bias` plus noise.
    BiasedNoisy { sigma_p: f64, bias: f64 },
}

impl FeedbackModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FeedbackModel::UnbiasedNoisy { sigma_p } | FeedbackModel::BiasedNoisy { sigma_p, .. }
                if !(sigma_p >= 0.0 && sigma_p.is_finite()) =>
            {
                Err(Error::InvalidFeedback(format!("sigma_p must be finite and >= 0, got {sigma_p}")))
            }
            FeedbackModel::BiasedNoisy { bias, .. } if !bias.is_finite() => {
                Err(Error::InvalidFeedback(format!("bias must be finite, got {bias}")))
            }
            _ => Ok(()),
        }
    }

    /// Partial-feedback scale, zero for models without noisy partials.
    pub fn sigma_p(&self) -> f64 {
        match *self {
            FeedbackModel::UnbiasedNoisy { sigma_p } | FeedbackModel::BiasedNoisy { sigma_p, .. } => {
                sigma_p
            }
            _ => 0.0,
        }
    }
}

/// Ground truth for one arm. The arm's id is its position in the instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub mu: f64,
    pub sigma: f64,
    pub feedback: FeedbackModel,
    pub delay: DelayDist,
}

impl ArmSpec {
    pub fn new(mu: f64, sigma: f64, feedback: FeedbackModel, delay: DelayDist) -> Self {
        ArmSpec {
            mu,
            sigma,
            feedback,
            delay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidInstance(format!("mean must be finite, got {}", self.mu)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        self.feedback.validate()?;
        self.delay.validate()
    }
}

/// A top-k identification problem over a fixed set of arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    arms: Vec<ArmSpec>,
    k: usize,
    delta: f64,
    d_max: u64,
}

impl ProblemInstance {
    /// Validates and builds an instance. `d_max` defaults to the largest
    /// delay any arm can produce.
    pub fn new(arms: Vec<ArmSpec>, k: usize, delta: f64, d_max: Option<u64>) -> Result<Self> {
        let n = arms.len();
        if k < 1 || k >= n {
            return Err(Error::InvalidInstance(format!("need 1 <= k < n, got k={k} n={n}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInstance(format!("need 0 < delta < 1, got {delta}")));
        }
        for arm in &arms {
            arm.validate()?;
        }
        let mut means: Vec<f64> = arms.iter().map(|a| a.mu).collect();
        means.sort_by(|a, b| a.total_cmp(b));
        if means.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance("arm means must be pairwise distinct".into()));
        }
        let largest = arms.iter().map(|a| a.delay.d_max()).max().unwrap_or(1);
        let d_max = d_max.unwrap_or(largest);
        if d_max < largest {
            return Err(Error::InvalidInstance(format!(
                "d_max={d_max} is below the largest arm delay {largest}"
            )));
        }
        Ok(ProblemInstance {
            arms,
            k,
            delta,
            d_max,
        })
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn n(&self) -> usize {
        self.arms.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn d_max(&self) -> u64 {
        self.d_max
    }

    /// Indices of the k arms with the largest means, ascending.
    pub fn top_k(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| self.arms[b].mu.total_cmp(&self.arms[a].mu));
        let mut top = idx[..self.k].to_vec();
        top.sort_unstable();
        top
    }
}

/// One pull: its delay and the partial feedback revealed at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct PullRealization {
    pub arm: usize,
    pub pull_index: u64,
    pub delay: u64,
    /// `partials[j]` is revealed `j + 1` steps after the pull starts.
    pub partials: Vec<f64>,
    /// The full feedback X: the last partial, or the increment sum for
    /// incremental feedback.
    pub full: f64,
}

/// Independent stream for the `pull_index`-th pull of `arm`.
pub fn substream(master_seed: u64, arm: usize, pull_index: u64) -> PullStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(arm as u64);
    // 2^32 words per pull is far more than any realization consumes.
    rng.set_word_pos(u128::from(pull_index) << 32);
    rng
}

pub fn sample_delay<R: Rng + ?Sized>(dist: &DelayDist, rng: &mut R) -> u64 {
    match *dist {
        DelayDist::Constant { d } => d,
        DelayDist::UniformInt { lo, hi } => rng.random_range(lo..=hi),
        DelayDist::TruncGeometric { p, cap } => {
            let failures = Geometric::new(p).expect("validated p").sample(rng);
            failures.saturating_add(1).min(cap)
        }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + std * z
}

/// Samples the delay, then the feedback sequence. The delay and the full
/// feedback are always the first two draws for the non-incremental models,
/// so they agree across feedback models that share a stream.
pub fn sample_pull<R: Rng + ?Sized>(spec: &ArmSpec, arm: usize, pull_index: u64, rng: &mut R) -> PullRealization {
    let delay = sample_delay(&spec.delay, rng);
    let d = delay as usize;
    let std = gaussian_std(spec.sigma);
    let mut partials = Vec::with_capacity(d);
    let full = match spec.feedback {
        FeedbackModel::FullDelayed => {
            let x = normal(rng, spec.mu, std);
            partials.resize(d - 1, 0.0);
            partials.push(x);
            x
        }
        FeedbackModel::Incremental => {
            let inc_std = std / (delay as f64).sqrt();
            let inc_mean = spec.mu / delay as f64;
            let mut sum = 0.0;
            for _ in 0..d {
                let y = normal(rng, inc_mean, inc_std);
                sum += y;
                partials.push(y);
            }
            sum
        }
        FeedbackModel::UnbiasedNoisy { sigma_p } | FeedbackModel::BiasedNoisy { sigma_p, .. } => {
            let bias = match spec.feedback {
                FeedbackModel::BiasedNoisy { bias, .. } => bias,
                _ => 0.0,
            };
            let x = normal(rng, spec.mu, std);
            let p_std = gaussian_std(sigma_p);
            for _ in 1..d {
                partials.push(normal(rng, x + bias, p_std));
            }
            partials.push(x);
            x
        }
    };
    PullRealization {
        arm,
        pull_index,
        delay,
        partials,
        full,
    }
}

/// Samples the `pull_index`-th pull of arm `arm` from its keyed substream.
pub fn realize(instance: &ProblemInstance, master_seed: u64, arm: usize, pull_index: u64) -> PullRealization {
    let mut rng = substream(master_seed, arm, pull_index);
    sample_pull(&instance.arms()[arm], arm, pull_index, &mut rng)
}
