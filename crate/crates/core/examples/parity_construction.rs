//! A one-head layer with post-processing of degree `n` that sign-represents parity.

use attnrat::parity::{build_parity_layer, parity_interpolant, quarter, theorem1_report};
use attnrat::rational::format_rational;

fn main() -> attnrat::Result<()> {
    for n in 1..=4 {
        println!("q_{n}(z) = {}", parity_interpolant(n));
    }
    println!();
    for n in [2, 5, 8, 12] {
        let layer = build_parity_layer(n)?;
        let r = theorem1_report(&layer, 20)?;
        println!(
            "n={n:>2}: h={} p={} sign-represents={} hp={} n/4={} satisfied={}",
            r.h,
            r.p,
            r.sign_represents,
            r.hp,
            format_rational(&quarter(n)),
            r.satisfied
        );
    }
    Ok(())
}
