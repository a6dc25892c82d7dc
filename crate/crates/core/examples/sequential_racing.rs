//! Top-k identification with delayed full feedback on a small instance,
//! with the pull trace of one run.

use delayed_bai::lil::LilParams;
use delayed_bai::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};
use delayed_bai::racing::{race, Racer};

fn main() -> delayed_bai::Result<()> {
    let delay = DelayDist::UniformInt { lo: 1, hi: 5 };
    let arms = [0.9, 0.7, 0.5, 0.3]
        .iter()
        .map(|&mu| ArmSpec::new(mu, 0.2, FeedbackModel::FullDelayed, delay))
        .collect();
    let inst = ProblemInstance::new(arms, 2, 0.05, None)?;

    let r = race(&inst, 7, Racer::FullDf, LilParams::default())?;
    println!("accepted {:?}, rejected {:?}, correct: {}", r.accepted, r.rejected, r.correct);
    println!("time steps: {}, pulls per arm: {:?}", r.delayed_sample_complexity, r.pulls_per_arm);
    println!("first pulls (arm, start, end, delay):");
    for p in r.trace.iter().take(8) {
        println!("  {} {:>4} {:>4} {:>2}", p.arm, p.start, p.end, p.delay);
    }

    let runs = 50;
    let total: u64 = (0..runs)
        .map(|seed| race(&inst, seed, Racer::FullDf, LilParams::default()).unwrap().delayed_sample_complexity)
        .sum();
    println!("mean time steps over {runs} seeds: {:.1}", total as f64 / runs as f64);
    Ok(())
}
