//! Partial feedback with a constant offset: the bias-correcting racer still
//! identifies the top arms. A constant offset cancels in the bias estimate,
//! so the cost does not depend on it.

use delayed_bai::lil::LilParams;
use delayed_bai::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};
use delayed_bai::racing::{race, Racer};

fn instance(bias: f64) -> delayed_bai::Result<ProblemInstance> {
    let feedback = FeedbackModel::BiasedNoisy { sigma_p: 0.01, bias };
    let arms = (0..8)
        .map(|i| ArmSpec::new(1.0 - 0.1 * i as f64, 0.1, feedback, DelayDist::UniformInt { lo: 1, hi: 10 }))
        .collect();
    ProblemInstance::new(arms, 2, 0.05, None)
}

fn main() -> delayed_bai::Result<()> {
    let lil = LilParams::default();
    let seeds = 30;
    println!("{:>6} {:>10} {:>10} {:>8}", "bias", "mean t_df", "mean t_pf", "correct");
    for bias in [0.0, 0.05, 0.5, 5.0] {
        let inst = instance(bias)?;
        let (mut df, mut pf, mut correct) = (0u64, 0u64, 0);
        for seed in 0..seeds {
            df += race(&inst, seed, Racer::FullDf, lil)?.delayed_sample_complexity;
            let r = race(&inst, seed, Racer::BiasedPf, lil)?;
            pf += r.delayed_sample_complexity;
            correct += usize::from(r.correct);
        }
        println!(
            "{bias:>6} {:>10.1} {:>10.1} {correct:>5}/{seeds}",
            df as f64 / seeds as f64,
            pf as f64 / seeds as f64
        );
    }
    Ok(())
}
