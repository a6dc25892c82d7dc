//! Paired comparison of the full-feedback racer and the racer that also uses
//! unbiased partial feedback, across partial-noise levels.

use delayed_bai::harness::{improvement_ratio, run_experiment, Algorithm, ExperimentConfig};

fn main() -> delayed_bai::Result<()> {
    let base = ExperimentConfig {
        n: 10,
        k: Some(2),
        sigma: 0.1,
        runs: 40,
        master_seed: 3,
        ..ExperimentConfig::default()
    };
    println!("{:>13} {:>10} {:>10} {:>8}", "sigma_p/sigma", "mean t_pf", "mean t_df", "ratio");
    for ratio in [0.01, 0.1, 1.0, 10.0, 1e6] {
        let mut c = base.clone();
        c.sigma_p = ratio * c.sigma;
        c.algorithm = Algorithm::RaceUnbiasedPf;
        let pf = run_experiment(&c)?;
        c.algorithm = Algorithm::RaceFullDf;
        let df = run_experiment(&c)?;
        let mean = |rows: &[delayed_bai::harness::ResultRow]| {
            rows.iter().map(|r| r.delayed_sample_complexity as f64).sum::<f64>() / rows.len() as f64
        };
        let s = improvement_ratio(&pf, &df)?;
        println!("{ratio:>13} {:>10.1} {:>10.1} {:>8.4}", mean(&pf), mean(&df), s.mean);
    }
    Ok(())
}
