//! Boolean-function measures and the exact PTF feasibility LP for parity.

use attnrat::parity::{
    average_sensitivity, majority, parity, parity_correlation, ptf_parity_feasible, ptf_witness,
    symmetric_parity_feasible, PTF_MAX_N,
};
use attnrat::rational::format_rational;

fn main() -> attnrat::Result<()> {
    for n in 1..=5 {
        let (par, maj) = (parity(n), majority(n));
        println!(
            "n={n}: AS(parity) = {}, AS(majority) = {}, corr(majority, parity) = {}",
            format_rational(&average_sensitivity(&par)),
            format_rational(&average_sensitivity(&maj)),
            format_rational(&parity_correlation(&maj)),
        );
    }

    println!("\nsmallest PTF degree for parity:");
    for n in 1..=PTF_MAX_N {
        let k = (0..=n).find(|&k| ptf_parity_feasible(n, k).unwrap()).unwrap();
        let symmetric = (0..=n).find(|&k| symmetric_parity_feasible(n, k)).unwrap();
        println!("  n={n}: k = {k} (symmetrized LP agrees: {})", k == symmetric);
    }

    let w = ptf_witness(&parity(3), 3).expect("degree 3 suffices");
    println!("\nwitness for n=3: {w}");
    Ok(())
}
