//! Independent reference computations shared by the oracle and acceptance
//! suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use delayed_bai::lil::{LilParams, PartialShape};
use delayed_bai::racing::ArmStatus;

/// Minimum of `f` over `points` interior grid points of `(lo, hi)`, then
/// again on a grid around the best point, `levels` times.
pub fn grid_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, points: usize, levels: usize) -> f64 {
    let mut best = (f64::INFINITY, lo);
    for _ in 0..levels {
        let h = (hi - lo) / (points + 1) as f64;
        for i in 1..=points {
            let x = lo + h * i as f64;
            let v = f(x);
            if v < best.0 {
                best = (v, x);
            }
        }
        lo = (best.1 - h).max(lo);
        hi = (best.1 + h).min(hi);
    }
    best.0
}

/// Minimum of the biased radius over an interior `points x points` grid of
/// the simplex, zoomed around the best cell `levels` times.
pub fn simplex_grid_min(p: &LilParams, shape: &PartialShape, delta: f64, points: usize, levels: usize) -> f64 {
    let (mut f_lo, mut f_hi, mut p_lo, mut p_hi) = (0.0, delta, 0.0, delta);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..levels {
        let hf = (f_hi - f_lo) / (points + 1) as f64;
        let hp = (p_hi - p_lo) / (points + 1) as f64;
        for i in 1..=points {
            for j in 1..=points {
                let df = f_lo + hf * i as f64;
                let dp = p_lo + hp * j as f64;
                let db = delta - df - dp;
                if db <= 0.0 {
                    continue;
                }
                let v = p.combined_radius_biased(shape, df, dp, db).unwrap();
                if v < best.0 {
                    best = (v, df, dp);
                }
            }
        }
        f_lo = (best.1 - hf).max(0.0);
        f_hi = best.1 + hf;
        p_lo = (best.2 - hp).max(0.0);
        p_hi = best.2 + hp;
    }
    best.0
}

/// Same, on a grid over `(ln delta_p, ln delta_b)`, which resolves optima
/// where one share is many orders of magnitude below the others.
pub fn log_simplex_grid_min(p: &LilParams, shape: &PartialShape, delta: f64, points: usize, levels: usize) -> f64 {
    let floor = (delta * 1e-14).ln();
    let (mut p_lo, mut p_hi, mut b_lo, mut b_hi) = (floor, delta.ln(), floor, delta.ln());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..levels {
        let hp = (p_hi - p_lo) / (points - 1) as f64;
        let hb = (b_hi - b_lo) / (points - 1) as f64;
        for i in 0..points {
            for j in 0..points {
                let (lp, lb) = (p_lo + hp * i as f64, b_lo + hb * j as f64);
                let (dp, db) = (lp.exp(), lb.exp());
                let df = delta - dp - db;
                if df <= 0.0 {
                    continue;
                }
                let v = p.combined_radius_biased(shape, df, dp, db).unwrap();
                if v < best.0 {
                    best = (v, lp, lb);
                }
            }
        }
        (p_lo, p_hi) = (best.1 - hp, (best.1 + hp).min(delta.ln()));
        (b_lo, b_hi) = (best.2 - hb, (best.2 + hb).min(delta.ln()));
    }
    best.0
}

/// Accept/reject decisions by counting, without order statistics.
pub fn counting_oracle(lcb: &[f64], ucb: &[f64], k_t: usize) -> Vec<ArmStatus> {
    (0..lcb.len())
        .map(|i| {
            let ucb_above = ucb.iter().filter(|&&u| u >= lcb[i]).count();
            let lcb_above = lcb.iter().filter(|&&l| l > ucb[i]).count();
            if ucb_above <= k_t {
                ArmStatus::Accepted
            } else if lcb_above >= k_t {
                ArmStatus::Rejected
            } else {
                ArmStatus::Surviving
            }
        })
        .collect()
}

pub fn rational_log_bar(n: usize) -> BigRational {
    let mut s = BigRational::new(BigInt::one(), BigInt::from(2));
    for i in 2..=n {
        s += BigRational::new(BigInt::one(), BigInt::from(i));
    }
    s
}

pub fn rational_schedule(n: usize, t_max: u64) -> Vec<u64> {
    let lb = rational_log_bar(n);
    let spare = BigRational::from_integer(BigInt::from(t_max - n as u64));
    (1..n)
        .map(|p| {
            let q = &spare / (&lb * BigRational::from_integer(BigInt::from(n + 1 - p)));
            q.ceil().to_integer().to_u64().unwrap()
        })
        .collect()
}

pub fn rational_h2(means: &[f64], k: usize) -> BigRational {
    let mut m: Vec<BigRational> = means.iter().map(|&x| BigRational::from_float(x).unwrap()).collect();
    m.sort_by(|a, b| b.cmp(a));
    let (upper, lower) = (m[k - 1].clone(), m[k].clone());
    let mut best = BigRational::zero();
    for (i, x) in m.iter().enumerate() {
        let gap = if i < k { x - &lower } else { &upper - x };
        let v = BigRational::from_integer(BigInt::from(i + 1)) / (&gap * &gap);
        if v > best {
            best = v;
        }
    }
    best
}
