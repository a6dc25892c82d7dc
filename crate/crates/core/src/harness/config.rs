//! Experiment configuration, read from TOML.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::batch::{BatchConfig, PartialModel};
use crate::error::{Error, Result};
use crate::lil::LilParams;
use crate::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};
use crate::racing::Racer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RaceFullDf,
    RaceUnbiasedPf,
    RaceBiasedPf,
    BatchFull,
    BatchPf,
    Sar,
    SarFullDf,
    SarNaiveDf,
}

/// The subcommand an algorithm belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Race,
    Batch,
    Budget,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::RaceFullDf,
        Algorithm::RaceUnbiasedPf,
        Algorithm::RaceBiasedPf,
        Algorithm::BatchFull,
        Algorithm::BatchPf,
        Algorithm::Sar,
        Algorithm::SarFullDf,
        Algorithm::SarNaiveDf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RaceFullDf => "race_full_df",
            Algorithm::RaceUnbiasedPf => "race_unbiased_pf",
            Algorithm::RaceBiasedPf => "race_biased_pf",
            Algorithm::BatchFull => "batch_full",
            Algorithm::BatchPf => "batch_pf",
            Algorithm::Sar => "sar",
            Algorithm::SarFullDf => "sar_full_df",
            Algorithm::SarNaiveDf => "sar_naive_df",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Algorithm::RaceFullDf | Algorithm::RaceUnbiasedPf | Algorithm::RaceBiasedPf => {
                Family::Race
            }
            Algorithm::BatchFull | Algorithm::BatchPf => Family::Batch,
            Algorithm::Sar | Algorithm::SarFullDf | Algorithm::SarNaiveDf => Family::Budget,
        }
    }

    /// The algorithm an improvement ratio is measured against.
    pub fn baseline(self) -> Option<Algorithm> {
        match self {
            Algorithm::RaceUnbiasedPf | Algorithm::RaceBiasedPf => Some(Algorithm::RaceFullDf),
            Algorithm::BatchPf => Some(Algorithm::BatchFull),
            Algorithm::SarFullDf => Some(Algorithm::SarNaiveDf),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::Config(format!("unknown algorithm {s:?}, expected one of {names:?}"))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanFamily {
    /// `mu_i = c - (i/n)^c_tilde`
    Bounded,
    /// `mu_i = c - c_tilde * i`
    Free,
    /// The `means` list as given.
    Explicit,
}

/// Descending arm means of a named family, `i = 1..n`.
pub fn build_means(family: MeanFamily, n: usize, c: f64, c_tilde: f64) -> Result<Vec<f64>> {
    if !(c_tilde > 0.0 && c_tilde.is_finite()) {
        return Err(Error::Config(format!("need c_tilde > 0, got {c_tilde}")));
    }
    let nf = n as f64;
    let means: Vec<f64> = (1..=n)
        .map(|i| {
            let i = i as f64;
            match family {
                MeanFamily::Bounded => c - (i / nf).powf(c_tilde),
                MeanFamily::Free => c - c_tilde * i,
                MeanFamily::Explicit => unreachable!("explicit means are not generated"),
            }
        })
        .collect();
    if means.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Config(format!(
            "{family:?} means with n={n}, c={c}, c_tilde={c_tilde} are not distinct"
        )));
    }
    Ok(means)
}

/// One experiment: an instance family, an algorithm and a replication plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub algorithm: Algorithm,
    pub n: usize,
    /// Defaults to `ceil(0.2 n)`.
    pub k: Option<usize>,
    pub delta: f64,
    pub b: usize,
    pub r: usize,
    /// Defaults to off for `batch_full` and on for `batch_pf`.
    pub cancel_on_elimination: Option<bool>,
    /// Feedback model used by `batch_pf`.
    pub partial_model: PartialModel,
    /// Budget of the fixed-budget algorithms.
    pub t_max: Option<u64>,
    pub mean_family: MeanFamily,
    pub means: Vec<f64>,
    pub c: f64,
    pub c_tilde: f64,
    pub sigma: f64,
    pub sigma_p: f64,
    pub bias: f64,
    pub delay: DelayDist,
    /// Delay bound announced to the fixed-budget algorithms; defaults to
    /// the largest delay the distribution can produce.
    pub d_max: Option<u64>,
    pub runs: u64,
    pub master_seed: u64,
    pub lil_c: f64,
    pub lil_a: f64,
    /// Measure per-run wall time; off keeps the CSV reproducible.
    pub record_wall_ms: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: "custom".into(),
            algorithm: Algorithm::RaceFullDf,
            n: 20,
            k: None,
            delta: 0.05,
            b: 10,
            r: 10,
            cancel_on_elimination: None,
            partial_model: PartialModel::Unbiased,
            t_max: None,
            mean_family: MeanFamily::Free,
            means: Vec::new(),
            c: 1.0,
            c_tilde: 0.025,
            sigma: 0.1,
            sigma_p: 0.01,
            bias: 0.0,
            delay: DelayDist::UniformInt { lo: 1, hi: 10 },
            d_max: None,
            runs: 100,
            master_seed: 0,
            lil_c: 1.1,
            lil_a: 0.6,
            record_wall_ms: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        super::presets::config_from_table(table)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or_else(|| (0.2 * self.n as f64).ceil() as usize)
    }

    pub fn means(&self) -> Result<Vec<f64>> {
        match self.mean_family {
            MeanFamily::Explicit => {
                if self.means.len() != self.n {
                    return Err(Error::Config(format!(
                        "n = {} but {} explicit means given",
                        self.n,
                        self.means.len()
                    )));
                }
                Ok(self.means.clone())
            }
            family => build_means(family, self.n, self.c, self.c_tilde),
        }
    }

    pub fn lil(&self) -> Result<LilParams> {
        LilParams::new(self.lil_c, self.lil_a)
    }

    pub fn batch(&self) -> BatchConfig {
        let cancel = self
            .cancel_on_elimination
            .unwrap_or(self.algorithm == Algorithm::BatchPf);
        BatchConfig::new(self.b, self.r).with_cancel(cancel)
    }

    /// Racer used by the racing and batch algorithms.
    pub fn racer(&self) -> Option<Racer> {
        match self.algorithm {
            Algorithm::RaceFullDf | Algorithm::BatchFull => Some(Racer::FullDf),
            Algorithm::RaceUnbiasedPf => Some(Racer::UnbiasedPf),
            Algorithm::RaceBiasedPf => Some(Racer::BiasedPf),
            Algorithm::BatchPf => Some(match self.partial_model {
                PartialModel::Unbiased => Racer::UnbiasedPf,
                PartialModel::Biased => Racer::BiasedPf,
            }),
            _ => None,
        }
    }

    fn feedback(&self) -> FeedbackModel {
        // Algorithms that ignore partials get the same pull stream as the
        // unbiased racer, so paired runs see identical delays and rewards.
        if self.racer() == Some(Racer::BiasedPf) {
            FeedbackModel::BiasedNoisy {
                sigma_p: self.sigma_p,
                bias: self.bias,
            }
        } else {
            FeedbackModel::UnbiasedNoisy {
                sigma_p: self.sigma_p,
            }
        }
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        let feedback = self.feedback();
        let arms = self
            .means()?
            .into_iter()
            .map(|mu| ArmSpec::new(mu, self.sigma, feedback, self.delay))
            .collect();
        ProblemInstance::new(arms, self.k(), self.delta, self.d_max)
    }

    /// Checks everything a run needs, so runs themselves cannot fail.
    pub fn validate(&self) -> Result<()> {
        self.instance()?;
        self.lil()?;
        match self.algorithm.family() {
            Family::Batch => self.batch().validate()?,
            Family::Budget => {
                let t_max = self
                    .t_max
                    .ok_or_else(|| Error::Config(format!("{} needs t_max", self.algorithm)))?;
                if t_max <= self.n as u64 {
                    return Err(Error::Config(format!(
                        "t_max = {t_max} must exceed n = {}",
                        self.n
                    )));
                }
            }
            Family::Race => {}
        }
        Ok(())
    }
}
