use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use delayed_bai::harness::{
    preset_names, ratio_table, run_experiment, run_preset, write_csv, write_ratio_csv, Algorithm,
    ExperimentConfig, Family, Preset,
};
use delayed_bai::{Error, Result};

/// Best-arm identification under delayed and partial feedback.
#[derive(Parser)]
#[command(name = "bai", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequential fixed-confidence racing.
    Race(RunArgs),
    /// Racing with several pulls in flight.
    Batch(RunArgs),
    /// Fixed-budget algorithms.
    Budget(RunArgs),
    /// Every algorithm of a preset, with paired improvement ratios.
    Experiment(ExperimentArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled preset to start from.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of replications.
    #[arg(long)]
    runs: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Algorithm, e.g. race_unbiased_pf.
    #[arg(long)]
    algo: Option<String>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated algorithms; defaults to the preset's list.
    #[arg(long, value_delimiter = ',')]
    algo: Vec<String>,
    /// Output directory for results.csv and ratios.csv; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match (&common.config, &common.preset) {
        (Some(path), _) => ExperimentConfig::from_file(path)?,
        (None, Some(name)) => {
            let preset = Preset::load(name)?;
            match <[ExperimentConfig; 1]>::try_from(preset.points) {
                Ok([single]) => single,
                Err(_) => {
                    return Err(Error::Config(format!(
                        "preset {name:?} is a sweep; use the experiment command"
                    )))
                }
            }
        }
        (None, None) => ExperimentConfig::default(),
    };
    if let (Some(_), Some(name)) = (&common.config, &common.preset) {
        config.preset = name.clone();
    }
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(runs) = common.runs {
        config.runs = runs;
    }
    Ok(config)
}

fn run(args: RunArgs, family: Family) -> Result<()> {
    let mut config = load_config(&args.common)?;
    if let Some(name) = &args.algo {
        config.algorithm = name.parse()?;
    } else if config.algorithm.family() != family {
        config.algorithm = match family {
            Family::Race => Algorithm::RaceUnbiasedPf,
            Family::Batch => Algorithm::BatchPf,
            Family::Budget => Algorithm::SarFullDf,
        };
    }
    if config.algorithm.family() != family {
        return Err(Error::Config(format!(
            "{} does not belong to this subcommand",
            config.algorithm
        )));
    }
    let rows = run_experiment(&config)?;
    write_csv(&rows, open_out(args.out.as_deref())?)
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let name = args
        .common
        .preset
        .clone()
        .ok_or_else(|| Error::Config("experiment needs --preset".into()))?;
    let mut preset = Preset::load(&name)?;
    if let Some(path) = &args.common.config {
        // a config file replaces the preset's points, keeping its algorithms
        let mut c = ExperimentConfig::from_file(path)?;
        c.preset = name.clone();
        preset.points = vec![c];
    }
    let algorithms = if args.algo.is_empty() {
        preset.algorithms.clone()
    } else {
        args.algo
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<Algorithm>>>()?
    };
    if algorithms.is_empty() {
        return Err(Error::Config(format!("preset {name:?} lists no algorithms; pass --algo")));
    }
    let rows = run_preset(&preset, &algorithms, args.common.runs, args.common.seed)?;
    let ratios = ratio_table(&rows)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_csv(&rows, open_out(Some(&dir.join("results.csv")))?)?;
            write_ratio_csv(&ratios, open_out(Some(&dir.join("ratios.csv")))?)?;
        }
        None => {
            write_csv(&rows, open_out(None)?)?;
            println!();
            write_ratio_csv(&ratios, open_out(None)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Race(a) => run(a, Family::Race),
        Command::Batch(a) => run(a, Family::Batch),
        Command::Budget(a) => run(a, Family::Budget),
        Command::Experiment(a) => experiment(a),
        Command::Presets => preset_names().map(|names| {
            for (name, desc) in names {
                println!("{name:24} {desc}");
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
