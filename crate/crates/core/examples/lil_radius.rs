//! Anytime confidence radius as a function of the sample count.

use delayed_bai::lil::LilParams;

fn main() -> delayed_bai::Result<()> {
    let p = LilParams::default();
    println!("c = {}, a = {}, zeta(2a/c) = {:.6}", p.c(), p.a(), p.zeta_value());
    println!("b at delta' = 0.0025: {:.6}", p.solve_b(0.0025)?);
    println!("{:>8} {:>12} {:>12}", "tau", "delta=0.05", "delta=0.001");
    for tau in [1, 2, 5, 10, 100, 1_000, 10_000, 1_000_000] {
        let wide = p.radius(1.0, tau, 0.05)?.value;
        let narrow = p.radius(1.0, tau, 0.001)?.value;
        println!("{tau:>8} {wide:>12.6} {narrow:>12.6}");
    }
    Ok(())
}
