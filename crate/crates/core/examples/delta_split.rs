//! Optimal division of the failure budget between the full-feedback and
//! partial-feedback parts of the combined radius.

use delayed_bai::lil::{LilParams, PartialShape, SplitCache};

fn main() -> delayed_bai::Result<()> {
    let p = LilParams::default();
    let delta = 0.05;

    println!("unbiased partials, sigma = 1, n = 10 arms");
    println!("{:>4} {:>4} {:>7} {:>10} {:>10} {:>10}", "F", "P", "sigma_p", "delta_f", "delta_p", "radius");
    for (full, partial, sigma_p) in [(1, 1, 0.1), (1, 8, 0.1), (5, 3, 0.5), (20, 2, 1.0), (3, 5, 1e6)] {
        let shape = PartialShape::unbiased(1.0, sigma_p, full, partial, 10);
        let s = p.split_delta_unbiased(&shape, delta)?;
        println!(
            "{full:>4} {partial:>4} {sigma_p:>7} {:>10.3e} {:>10.3e} {:>10.5}",
            s.delta_f, s.delta_p, s.radius
        );
    }

    let shape = PartialShape::biased(1.0, 0.5, 3, 4, 2, 8);
    let s = p.split_delta_biased(&shape, delta)?;
    println!(
        "\nbiased partials {shape:?}\n  delta_f {:.4e}, delta_p {:.4e}, delta_b {:.4e}, radius {:.6}",
        s.delta_f,
        s.delta_p,
        s.delta_b.unwrap_or(0.0),
        s.radius
    );

    // racers look the same shapes up many times
    let mut cache = SplitCache::new();
    for _ in 0..3 {
        cache.unbiased(&p, &PartialShape::unbiased(1.0, 0.1, 4, 2, 10), delta);
    }
    println!("cache holds {} split(s) after 3 lookups", cache.len());
    Ok(())
}
