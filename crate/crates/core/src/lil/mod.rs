//! Anytime confidence radii from the finite law of the iterated logarithm.
//!
//! For i.i.d. sub-Gaussian samples with scale `sigma`, the empirical mean
//! after `tau` samples stays within
//!
//! ```text
//! C(sigma, tau, delta') = sigma * sqrt((a * ln(log_c(tau) + 1) + b) / tau)
//! ```
//!
//! of the true mean simultaneously for every `tau`, with probability at
//! least `1 - 2 zeta(2a/c) exp(-2b/c)`. [`LilParams::solve_b`] picks `b` so
//! that this failure probability is exactly `delta'`.
//!
//! Combined radii for estimators that mix completed pulls with the partial
//! feedback of an in-flight pull are sums of such radii, one per
//! union-bounded component. The error budget `delta` is split across the
//! components to make the sum as small as possible, see [`split`].

mod split;
pub mod zeta;

pub use split::{DeltaSplit, SplitCache};

use crate::error::{out_of_range, Result};

/// Constants of the LIL bound. `zeta_value` is `zeta(2a/c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LilParams {
    c: f64,
    a: f64,
    zeta_value: f64,
    ln_c: f64,
    ln_two_zeta: f64,
}

impl Default for LilParams {
    fn default() -> Self {
        LilParams::new(1.1, 0.6).expect("default constants are valid")
    }
}

impl LilParams {
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(out_of_range("c", format!("need c > 1, got {c}")));
        }
        if !(2.0 * a > c && a.is_finite()) {
            return Err(out_of_range("a", format!("need 2a > c, got a={a} c={c}")));
        }
        let zeta_value = zeta::zeta(2.0 * a / c);
        Ok(LilParams {
            c,
            a,
            zeta_value,
            ln_c: c.ln(),
            ln_two_zeta: (2.0 * zeta_value).ln(),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn zeta_value(&self) -> f64 {
        self.zeta_value
    }

    /// The `b` for which the bound fails with probability exactly `delta_prime`.
    pub fn solve_b(&self, delta_prime: f64) -> Result<f64> {
        if !(delta_prime > 0.0 && delta_prime < 2.0 * self.zeta_value) {
            return Err(out_of_range(
                "delta_prime",
                format!(
                    "need 0 < delta' < 2 zeta(2a/c) = {}, got {delta_prime}",
                    2.0 * self.zeta_value
                ),
            ));
        }
        Ok(0.5 * self.c * (self.ln_two_zeta - delta_prime.ln()))
    }

    /// `a * ln(log_c(tau) + 1)`.
    #[inline]
    fn iterated_log(&self, tau: u64) -> f64 {
        self.a * ((tau as f64).ln() / self.ln_c + 1.0).ln()
    }

    /// Radius `C(sigma, tau, delta')`.
    pub fn radius(&self, sigma: f64, tau: u64, delta_prime: f64) -> Result<Radius> {
        if tau == 0 {
            return Err(out_of_range("tau", "the radius needs at least one sample"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(out_of_range("sigma", format!("need finite sigma >= 0, got {sigma}")));
        }
        let b = self.solve_b(delta_prime)?;
        Ok(Radius {
            value: sigma * ((self.iterated_log(tau) + b) / tau as f64).sqrt(),
            tau,
            delta_prime,
        })
    }

    /// Unchecked radius value for hot loops: `tau >= 1`, `0 < delta' < 1`.
    #[inline]
    pub(crate) fn radius_value(&self, sigma: f64, tau: u64, delta_prime: f64) -> f64 {
        debug_assert!(tau >= 1 && delta_prime > 0.0 && delta_prime < 1.0);
        let b = 0.5 * self.c * (self.ln_two_zeta - delta_prime.ln());
        sigma * ((self.iterated_log(tau) + b) / tau as f64).sqrt()
    }

    /// Radius of the unbiased partial-feedback estimator: `full` counts the
    /// completed pulls plus the in-flight one, `partial` the partials of the
    /// in-flight pull.
    pub fn combined_radius_unbiased(
        &self,
        shape: &PartialShape,
        delta_f: f64,
        delta_p: f64,
    ) -> Result<f64> {
        if shape.full == 0 || shape.partial == 0 {
            return Err(out_of_range("F, P", "combined radius needs F >= 1 and P >= 1"));
        }
        let n = shape.arms as f64;
        let full = self.radius(shape.sigma, shape.full, delta_f / n)?.value;
        let partial = self.radius(shape.sigma_p, shape.partial, delta_p / n)?.value;
        Ok(full + partial / shape.full as f64)
    }

    /// Radius of the bias-corrected estimator; `bias_samples` completed pulls
    /// contributed to the bias estimate.
    pub fn combined_radius_biased(
        &self,
        shape: &PartialShape,
        delta_f: f64,
        delta_p: f64,
        delta_b: f64,
    ) -> Result<f64> {
        if shape.full < 2 || shape.partial == 0 || shape.bias_samples == 0 {
            return Err(out_of_range(
                "F, P, F_b",
                "biased radius needs F >= 2, P >= 1 and F_b >= 1",
            ));
        }
        let n = shape.arms as f64;
        let full = self.radius(shape.sigma, shape.full, delta_f / n)?.value;
        let partial = self.radius(shape.sigma_p, shape.partial, delta_p / n)?.value;
        let bias = self.radius(shape.sigma_p, shape.bias_samples, delta_b / n)?.value;
        Ok(full + (partial + bias) / shape.full as f64)
    }

    pub fn split_delta_unbiased(&self, shape: &PartialShape, delta: f64) -> Result<DeltaSplit> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(out_of_range("delta", format!("need 0 < delta < 1, got {delta}")));
        }
        if shape.full == 0 || shape.partial == 0 {
            return Err(out_of_range("F, P", "split needs F >= 1 and P >= 1"));
        }
        Ok(split::unbiased(self, shape, delta))
    }

    pub fn split_delta_biased(&self, shape: &PartialShape, delta: f64) -> Result<DeltaSplit> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(out_of_range("delta", format!("need 0 < delta < 1, got {delta}")));
        }
        if shape.full < 2 || shape.partial == 0 || shape.bias_samples == 0 {
            return Err(out_of_range(
                "F, P, F_b",
                "biased split needs F >= 2, P >= 1 and F_b >= 1",
            ));
        }
        Ok(split::biased(self, shape, delta))
    }
}

/// A confidence half-width together with the sample count and failure
/// probability it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub tau: u64,
    pub delta_prime: f64,
}

impl Radius {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Radius used before an arm has any usable sample; compares above every
/// finite radius.
pub fn infinite_radius() -> Radius {
    Radius {
        value: f64::INFINITY,
        tau: 0,
        delta_prime: 0.0,
    }
}

/// Sample counts and scales entering a combined radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialShape {
    pub sigma: f64,
    pub sigma_p: f64,
    /// F: completed pulls plus the in-flight pull.
    pub full: u64,
    /// P: partials observed for the in-flight pull.
    pub partial: u64,
    /// F_b: completed pulls with at least one intermediate partial.
    pub bias_samples: u64,
    /// n: number of arms in the union bound.
    pub arms: usize,
}

impl PartialShape {
    pub fn unbiased(sigma: f64, sigma_p: f64, full: u64, partial: u64, arms: usize) -> Self {
        PartialShape {
            sigma,
            sigma_p,
            full,
            partial,
            bias_samples: 0,
            arms,
        }
    }

    pub fn biased(
        sigma: f64,
        sigma_p: f64,
        full: u64,
        partial: u64,
        bias_samples: u64,
        arms: usize,
    ) -> Self {
        PartialShape {
            sigma,
            sigma_p,
            full,
            partial,
            bias_samples,
            arms,
        }
    }
}
