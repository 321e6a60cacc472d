//! Replace every ReLU gate of a network by a rational approximant and compose
//! the result symbolically into one multivariate rational function.

use attnrat::fixtures::{fold_network, sawtooth_network, single_gate_network};
use attnrat::rational::{format_rational, ratio};
use attnrat::relu::{approximate_network, ApproximationOptions};

fn main() -> attnrat::Result<()> {
    let opts = ApproximationOptions {
        grid_points: 20_000,
        ..Default::default()
    };
    let nets = [
        ("single gate", single_gate_network()),
        ("fold", fold_network()),
        ("sawtooth(3)", sawtooth_network(3)?),
    ];
    for (name, net) in &nets {
        for eps in [ratio(1, 2), ratio(1, 10)] {
            let a = approximate_network(net, &eps, &opts)?;
            println!(
                "{name:<12} eps={:<5} k={:?} degree={:<3} gate budget={} sup error={:.3e} ok={}",
                format_rational(&eps),
                a.k,
                a.degree(),
                format_rational(&a.gate_budget),
                a.measured_sup_error,
                a.within_epsilon()
            );
        }
    }

    let a = approximate_network(&single_gate_network(), &ratio(1, 2), &opts)?;
    println!("\nv(t) = ({}) / ({})", a.rational.numerator, a.rational.denominator);
    println!("{}", serde_json::to_string_pretty(&a.report()).expect("serializable"));
    Ok(())
}
