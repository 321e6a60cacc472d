//! Lower a layer with rational post-processing to one fraction `P~ / Q~` of
//! multilinear polynomials and check it against direct evaluation.

use attnrat::compiler::{
    common_denominator, compile_layer, head_to_rational, verify_equivalence, CompileOptions,
};
use attnrat::fixtures::{identity_layer, reciprocal_layer};
use attnrat::sampling::{random_valid_layer, trial_rng};

fn main() -> attnrat::Result<()> {
    let layer = identity_layer(3);
    let lowered = head_to_rational(&layer.heads()[0]);
    println!("N_1 = {}", lowered.numerators[0]);
    println!("D   = {}", lowered.denominator);

    let (s, m) = common_denominator(&[lowered.clone(), lowered])?;
    println!("two copies: S = {s}, M_1 = {}", m[0]);

    let opts = CompileOptions::default();
    let compiled = compile_layer(&layer, &opts)?;
    println!("P~ = {}", compiled.function.numerator);
    println!("Q~ = {}", compiled.function.denominator);

    let mut rng = trial_rng(7, 0);
    let (random, tries) = random_valid_layer(&mut rng, 5, 2, 2, 2)?;
    let compiled = compile_layer(&random, &opts)?;
    let report = verify_equivalence(&random, &compiled.function, opts.cap)?;
    println!(
        "random layer ({tries} draws rejected): degree bound {}, achieved {}/{}, {} points, match = {}",
        report.degree_bound,
        report.achieved_num_degree,
        report.achieved_den_degree,
        report.points_checked,
        report.success()
    );

    match compile_layer(&reciprocal_layer(2), &opts) {
        Ok(_) => println!("reciprocal layer compiled"),
        Err(e) => println!("reciprocal layer rejected: {e}"),
    }
    Ok(())
}
