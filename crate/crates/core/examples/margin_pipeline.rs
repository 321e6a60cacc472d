//! Layer with ReLU post-processing: find its parity margin, approximate the
//! network at half that margin, compile the approximant and compare `hp` with `n/4`.

use attnrat::fixtures::sawtooth_layer;
use attnrat::parity::{best_margin, parity};
use attnrat::rational::format_rational;
use attnrat::relu::{theorem2_report, ApproximationOptions, Theorem2Options};
use attnrat::report::layer_table;

fn main() -> attnrat::Result<()> {
    let opts = Theorem2Options {
        approximation: ApproximationOptions {
            grid_points: 20_000,
            ..Default::default()
        },
        ..Default::default()
    };
    for n in [2, 3, 4] {
        let layer = sawtooth_layer(n, 1)?;
        let (tau, gamma) = best_margin(&layer_table(&layer)?, &parity(n))?.expect("both classes present");
        let r = theorem2_report(&layer, &tau, &gamma, &opts)?;
        println!(
            "n={n} tau={} gamma={} m={} l={} -> eps={} p={} sign-represents={} margins hold={:?} hp={} n/4={} satisfied={}",
            format_rational(&tau),
            format_rational(&gamma),
            r.m,
            r.ell,
            r.epsilon.as_deref().unwrap_or("-"),
            r.bound.p,
            r.bound.sign_represents,
            r.proof_margins_hold,
            r.bound.hp,
            r.bound.bound,
            r.bound.satisfied
        );
        println!("    h m^l ln(2l/gamma)^(2l) = {:.4e}", r.bound_quantity_decimal);
    }
    Ok(())
}
