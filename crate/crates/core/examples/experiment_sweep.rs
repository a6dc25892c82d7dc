//! A bundled preset sweep run through the harness, with the raw rows and the
//! paired ratio table written as CSV to stdout.

use delayed_bai::harness::{preset_names, ratio_table, run_preset, write_csv, write_ratio_csv, Preset};

fn main() -> delayed_bai::Result<()> {
    for (name, desc) in preset_names()? {
        eprintln!("{name}: {desc}");
    }
    let preset = Preset::load("bounded-means-sweep")?;
    let rows = run_preset(&preset, &preset.algorithms, Some(10), Some(1))?;
    write_csv(&rows[..5], std::io::stdout())?;
    println!();
    write_ratio_csv(&ratio_table(&rows)?, std::io::stdout())?;
    Ok(())
}
