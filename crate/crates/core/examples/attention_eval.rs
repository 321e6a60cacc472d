//! Evaluate a single attention head and a full layer on every cube point.

use attnrat::attention::{uniform_mean_head, HeadSpec, LayerSpec, PostProcessing, RationalPost};
use attnrat::poly::{bits_of, bitstring};
use attnrat::rational::{format_rational, int, ratio};
use attnrat::Polynomial;

fn main() -> attnrat::Result<()> {
    let n = 3;
    // the last bit steers the query: positions matching it get weight 3
    let weights = (0..n)
        .map(|_| [[int(3), int(1)], [int(1), int(3)]])
        .collect();
    let values = (0..n).map(|_| [vec![int(0)], vec![int(1)]]).collect();
    let head = HeadSpec::new(n, 1, weights, values)?;

    let post = PostProcessing::Rational(RationalPost {
        numerator: Polynomial::var(1, 0)?.scale(&ratio(1, 2)),
        denominator: &Polynomial::one(1) + &Polynomial::var(1, 0)?,
        degree_bound: 1,
    });
    let layer = LayerSpec::new(vec![head.clone(), uniform_mean_head(n)], post)?;

    println!("x     head   sum   u(sum)");
    for idx in 0..1usize << n {
        let x = bits_of(n, idx);
        let y = head.eval(&x)?;
        let s = layer.sum_eval(&x)?;
        println!(
            "{}  {:>5}  {:>4}  {}",
            bitstring(&x),
            format_rational(&y[0]),
            format_rational(&s[0]),
            format_rational(&layer.eval(&x)?)
        );
    }
    println!("\n{}", layer.to_json());
    Ok(())
}
