//! Fixed-budget identification under delays: plain SAR, SAR with a phase
//! length padded for the worst delay, and SAR that replans from the time
//! actually left.

use delayed_bai::budget::{h2_complexity, misid_upper_bound, sar, sar_full_df, sar_naive_df, sar_schedule};
use delayed_bai::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};

fn main() -> delayed_bai::Result<()> {
    let means = [0.9, 0.85, 0.8, 0.75, 0.7];
    let k = 2;
    let t_max = 3000;
    let h2 = h2_complexity(&means, k)?;
    println!("H2 = {h2:.1}, undelayed error bound at T = {t_max}: {:.3}", misid_upper_bound(means.len(), t_max, h2)?);
    println!("undelayed phase targets: {:?}", sar_schedule(means.len(), t_max)?);

    let arms = means
        .iter()
        .map(|&mu| ArmSpec::new(mu, 1.0, FeedbackModel::FullDelayed, DelayDist::UniformInt { lo: 1, hi: 10 }))
        .collect();
    let inst = ProblemInstance::new(arms, k, 0.05, None)?;
    let seeds = 100;
    type Algo = fn(&ProblemInstance, u64, u64) -> delayed_bai::Result<delayed_bai::racing::RunResult>;
    let algos: [(&str, Algo); 3] = [("sar", sar), ("sar_naive_df", sar_naive_df), ("sar_full_df", sar_full_df)];
    println!("{:>13} {:>12} {:>8}", "algorithm", "mean spent", "errors");
    for (name, run) in algos {
        let (mut spent, mut errors) = (0, 0);
        for seed in 0..seeds {
            let r = run(&inst, t_max, seed)?;
            spent += r.delayed_sample_complexity;
            errors += usize::from(!r.correct);
        }
        println!("{name:>13} {:>12.1} {errors:>5}/{seeds}", spent as f64 / seeds as f64);
    }
    Ok(())
}
