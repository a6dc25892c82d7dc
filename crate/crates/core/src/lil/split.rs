//! Splitting the error budget across the components of a combined radius.
//!
//! Each component has the form `w * sqrt(alpha - beta * ln(x))` where `x` is
//! the share of the budget it receives (already divided by the number of
//! arms inside `alpha`). Every component is convex and decreasing in `x`, so
//! the sum is convex on the simplex `sum x = delta`.
//!
//! The two-component (unbiased) split is a golden-section search over
//! `delta_f`. The three-component (biased) split solves the stationarity
//! conditions `w_j beta / (2 x_j s_j) = lambda` directly: for fixed
//! `lambda` each `ln x_j` is the root of a concave increasing scalar
//! equation, and `lambda` is tuned until the shares sum to `delta`.

use std::collections::HashMap;

use super::{LilParams, PartialShape};
use crate::optimize::golden_section_min;

/// Relative share given to a component whose scale is zero.
const BOUNDARY: f64 = 1e-12;

/// Optimal split of `delta` and the radius it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSplit {
    pub delta_f: f64,
    pub delta_p: f64,
    pub delta_b: Option<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    weight: f64,
    alpha: f64,
}

impl Term {
    fn new(params: &LilParams, weight: f64, tau: u64, arms: usize) -> Self {
        let alpha = params.iterated_log(tau) + 0.5 * params.c * (params.ln_two_zeta + (arms as f64).ln());
        Term { weight, alpha }
    }

    #[inline]
    fn value(&self, beta: f64, x: f64) -> f64 {
        if self.weight == 0.0 {
            0.0
        } else {
            self.weight * (self.alpha - beta * x.ln()).sqrt()
        }
    }
}

pub(super) fn unbiased(params: &LilParams, shape: &PartialShape, delta: f64) -> DeltaSplit {
    let f = shape.full as f64;
    let full = Term::new(params, shape.sigma / f.sqrt(), shape.full, shape.arms);
    let partial = Term::new(
        params,
        shape.sigma_p / (f * (shape.partial as f64).sqrt()),
        shape.partial,
        shape.arms,
    );
    let eps = BOUNDARY * delta;
    let delta_f = match (full.weight > 0.0, partial.weight > 0.0) {
        (false, false) => 0.5 * delta,
        (true, false) => delta - eps,
        (false, true) => eps,
        (true, true) => {
            let beta = 0.5 * params.c;
            let objective = |x: f64| full.value(beta, x) + partial.value(beta, delta - x);
            golden_section_min(objective, eps, delta - eps, 1e-13 * delta).0
        }
    };
    let delta_p = delta - delta_f;
    let radius = radius_unbiased(params, shape, delta_f, delta_p);
    DeltaSplit {
        delta_f,
        delta_p,
        delta_b: None,
        radius,
    }
}

pub(super) fn biased(params: &LilParams, shape: &PartialShape, delta: f64) -> DeltaSplit {
    let f = shape.full as f64;
    let terms = [
        Term::new(params, shape.sigma / f.sqrt(), shape.full, shape.arms),
        Term::new(
            params,
            shape.sigma_p / (f * (shape.partial as f64).sqrt()),
            shape.partial,
            shape.arms,
        ),
        Term::new(
            params,
            shape.sigma_p / (f * (shape.bias_samples as f64).sqrt()),
            shape.bias_samples,
            shape.arms,
        ),
    ];
    let shares = stationary_split(&terms, 0.5 * params.c, delta);
    let radius = radius_biased(params, shape, shares[0], shares[1], shares[2]);
    DeltaSplit {
        delta_f: shares[0],
        delta_p: shares[1],
        delta_b: Some(shares[2]),
        radius,
    }
}

fn radius_unbiased(params: &LilParams, shape: &PartialShape, delta_f: f64, delta_p: f64) -> f64 {
    let n = shape.arms as f64;
    params.radius_value(shape.sigma, shape.full, delta_f / n)
        + params.radius_value(shape.sigma_p, shape.partial, delta_p / n) / shape.full as f64
}

fn radius_biased(
    params: &LilParams,
    shape: &PartialShape,
    delta_f: f64,
    delta_p: f64,
    delta_b: f64,
) -> f64 {
    let n = shape.arms as f64;
    params.radius_value(shape.sigma, shape.full, delta_f / n)
        + (params.radius_value(shape.sigma_p, shape.partial, delta_p / n)
            + params.radius_value(shape.sigma_p, shape.bias_samples, delta_b / n))
            / shape.full as f64
}

/// Root of `u + ln(alpha - beta u) / 2 = target` on the increasing branch.
fn log_share(term: &Term, beta: f64, target: f64) -> f64 {
    let phi = |u: f64| u + 0.5 * (term.alpha - beta * u).ln();
    let peak = term.alpha / beta - 0.5;
    if target >= phi(peak) {
        return peak;
    }
    let mut u = target.min(peak) - 1.0;
    while phi(u) >= target {
        u = 2.0 * u - 1.0;
    }
    // Newton from the left on a concave increasing function never overshoots.
    for _ in 0..100 {
        let slope = 1.0 - 0.5 * beta / (term.alpha - beta * u);
        let step = (target - phi(u)) / slope;
        u += step;
        if step.abs() <= 1e-15 * (1.0 + u.abs()) {
            break;
        }
    }
    u.min(peak)
}

fn stationary_split<const N: usize>(terms: &[Term; N], beta: f64, delta: f64) -> [f64; N] {
    let eps = BOUNDARY * delta;
    let active: Vec<usize> = (0..N).filter(|&j| terms[j].weight > 0.0).collect();
    let mut shares = [eps; N];
    match active.len() {
        0 => return [delta / N as f64; N],
        1 => {
            shares[active[0]] = delta - eps * (N - 1) as f64;
            return shares;
        }
        _ => {}
    }
    let budget = delta - eps * (N - active.len()) as f64;
    let offsets: Vec<f64> = active
        .iter()
        .map(|&j| (0.5 * terms[j].weight * beta).ln())
        .collect();

    // shares for a given ln(lambda), and d ln(sum) / d ln(lambda)
    let evaluate = |ln_lambda: f64, out: &mut Vec<f64>| -> (f64, f64) {
        out.clear();
        let mut total = 0.0;
        let mut weighted = 0.0;
        for (i, &j) in active.iter().enumerate() {
            let u = log_share(&terms[j], beta, offsets[i] - ln_lambda);
            let x = u.exp();
            let slope = 1.0 - 0.5 * beta / (terms[j].alpha - beta * u);
            total += x;
            weighted += x / slope.max(1e-12);
            out.push(x);
        }
        (total, -weighted / total)
    };

    // first guess: lambda from the stationarity condition at an even split
    let even = budget / active.len() as f64;
    let guess: f64 = active
        .iter()
        .map(|&j| {
            let t = &terms[j];
            0.5 * t.weight * beta / (t.alpha - beta * even.ln()).sqrt()
        })
        .sum::<f64>()
        / budget;
    let target = budget.ln();
    let mut xs = Vec::with_capacity(active.len());
    let mut ln_lambda = guess.ln();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..200 {
        let (total, deriv) = evaluate(ln_lambda, &mut xs);
        let h = total.ln() - target;
        if h.abs() < 1e-15 {
            break;
        }
        // h decreases in ln(lambda)
        if h > 0.0 {
            lo = ln_lambda;
        } else {
            hi = ln_lambda;
        }
        let mut next = ln_lambda - h / deriv;
        if !(next > lo && next < hi) {
            next = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                _ => hi - 1.0,
            };
        }
        if (next - ln_lambda).abs() < 1e-15 * (1.0 + ln_lambda.abs()) {
            break;
        }
        ln_lambda = next;
    }
    let (total, _) = evaluate(ln_lambda, &mut xs);
    let scale = budget / total;
    for (i, &j) in active.iter().enumerate() {
        shares[j] = xs[i] * scale;
    }
    shares
}

/// Memo of splits for one `(n, delta)` pair, keyed by scales and counts.
#[derive(Debug, Default)]
pub struct SplitCache {
    map: HashMap<(u64, u64, u64, u64, u64), DeltaSplit>,
}

impl SplitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn key(shape: &PartialShape) -> (u64, u64, u64, u64, u64) {
        (
            shape.sigma.to_bits(),
            shape.sigma_p.to_bits(),
            shape.full,
            shape.partial,
            shape.bias_samples,
        )
    }

    /// Unbiased split; the caller guarantees a fixed `(n, delta)` per cache.
    pub fn unbiased(&mut self, params: &LilParams, shape: &PartialShape, delta: f64) -> DeltaSplit {
        *self
            .map
            .entry(Self::key(shape))
            .or_insert_with(|| unbiased(params, shape, delta))
    }

    /// Biased split; the caller guarantees a fixed `(n, delta)` per cache.
    pub fn biased(&mut self, params: &LilParams, shape: &PartialShape, delta: f64) -> DeltaSplit {
        *self
            .map
            .entry(Self::key(shape))
            .or_insert_with(|| biased(params, shape, delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> LilParams {
        LilParams::default()
    }

    #[test]
    fn unbiased_degenerate_partial_scale() {
        let p = params();
        let shape = PartialShape::unbiased(1.0, 0.0, 3, 4, 10);
        let s = p.split_delta_unbiased(&shape, 0.05).unwrap();
        assert_eq!(s.delta_f, 0.05 - 0.05e-12);
        assert!((s.delta_f + s.delta_p - 0.05).abs() < 1e-15);
        assert!((s.radius - p.radius(1.0, 3, s.delta_f / 10.0).unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn unbiased_all_zero_scales() {
        let s = params()
            .split_delta_unbiased(&PartialShape::unbiased(0.0, 0.0, 2, 2, 3), 0.1)
            .unwrap();
        assert_eq!((s.delta_f, s.delta_p, s.radius), (0.05, 0.05, 0.0));
    }

    #[test]
    fn unbiased_symmetric() {
        let s = params()
            .split_delta_unbiased(&PartialShape::unbiased(0.8, 0.8, 1, 1, 6), 0.05)
            .unwrap();
        // the objective is flat to rounding within ~sqrt(eps) of the optimum
        assert!((s.delta_f - 0.025).abs() < 1e-6 * 0.05, "{s:?}");
    }

    #[test]
    fn unbiased_rejects_bad_input() {
        let p = params();
        assert!(p.split_delta_unbiased(&PartialShape::unbiased(1.0, 1.0, 1, 1, 2), 1.0).is_err());
        assert!(p.split_delta_unbiased(&PartialShape::unbiased(1.0, 1.0, 0, 1, 2), 0.1).is_err());
    }

    #[test]
    fn biased_degenerate_partial_scale() {
        let p = params();
        let shape = PartialShape::biased(1.0, 0.0, 3, 4, 2, 8);
        let s = p.split_delta_biased(&shape, 0.05).unwrap();
        assert!((s.delta_f - 0.05).abs() < 1e-12);
        let sum = s.delta_f + s.delta_p + s.delta_b.unwrap();
        assert!((sum - 0.05).abs() < 1e-15);
        assert!((s.radius - p.radius(1.0, 3, s.delta_f / 8.0).unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn biased_symmetric_partial_terms() {
        let s = params()
            .split_delta_biased(&PartialShape::biased(0.5, 0.5, 5, 3, 3, 4), 0.05)
            .unwrap();
        let db = s.delta_b.unwrap();
        assert!((s.delta_p - db).abs() < 1e-12 * 0.05, "{s:?}");
    }

    #[test]
    fn both_routes_agree_on_two_terms() {
        // golden-section and the stationarity solver on the same problem
        let p = params();
        for &(sigma, sigma_p, f, pp) in &[(1.0, 0.3, 2, 5), (0.1, 0.01, 40, 3), (1.0, 5.0, 1, 1), (0.2, 0.2, 300, 9)] {
            let shape = PartialShape::unbiased(sigma, sigma_p, f, pp, 10);
            let golden = p.split_delta_unbiased(&shape, 0.05).unwrap();
            let fl = f as f64;
            let terms = [
                Term::new(&p, sigma / fl.sqrt(), f, 10),
                Term::new(&p, sigma_p / (fl * (pp as f64).sqrt()), pp, 10),
            ];
            let shares = stationary_split(&terms, 0.5 * p.c(), 0.05);
            let r = radius_unbiased(&p, &shape, shares[0], shares[1]);
            assert!((r - golden.radius).abs() < 1e-12, "{r} vs {}", golden.radius);
        }
    }

    #[test]
    fn cache_returns_identical_split() {
        let p = params();
        let mut cache = SplitCache::new();
        let shape = PartialShape::biased(1.0, 0.4, 6, 2, 4, 5);
        let a = cache.biased(&p, &shape, 0.05);
        let b = cache.biased(&p, &shape, 0.05);
        assert_eq!(a, b);
        assert_eq!(cache.len(), 1);
        assert_eq!(a, p.split_delta_biased(&shape, 0.05).unwrap());
    }
}
