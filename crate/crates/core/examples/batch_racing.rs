//! Racing with up to b pulls in flight, at most r of them on one arm.

use delayed_bai::batch::{batch_race, BatchConfig};
use delayed_bai::lil::LilParams;
use delayed_bai::model::{ArmSpec, DelayDist, FeedbackModel, ProblemInstance};
use delayed_bai::racing::Racer;

fn main() -> delayed_bai::Result<()> {
    let feedback = FeedbackModel::UnbiasedNoisy { sigma_p: 0.01 };
    let arms = (0..20)
        .map(|i| ArmSpec::new(1.0 - 0.05 * i as f64, 0.1, feedback, DelayDist::UniformInt { lo: 1, hi: 10 }))
        .collect();
    let inst = ProblemInstance::new(arms, 4, 0.05, None)?;
    let lil = LilParams::default();
    let seeds = 20;

    println!("{:>4} {:>4} {:>10} {:>10}", "b", "r", "full", "partial");
    for (b, r) in [(1, 1), (5, 1), (10, 1), (10, 5), (10, 10), (40, 10)] {
        let mean = |racer: Racer, cancel: bool| -> delayed_bai::Result<f64> {
            let cfg = BatchConfig::new(b, r).with_cancel(cancel);
            let mut total = 0;
            for seed in 0..seeds {
                total += batch_race(&inst, cfg, seed, racer, lil)?.delayed_sample_complexity;
            }
            Ok(total as f64 / seeds as f64)
        };
        println!(
            "{b:>4} {r:>4} {:>10.1} {:>10.1}",
            mean(Racer::FullDf, false)?,
            mean(Racer::UnbiasedPf, true)?
        );
    }
    Ok(())
}
