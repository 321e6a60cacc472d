//! Newman's rational approximation of |x| and the derived ReLU approximant.

use attnrat::rational::{format_rational, int, ratio};
use attnrat::relu::{newman_abs, newman_xi, rational_relu, scaled_rational_relu};

fn main() -> attnrat::Result<()> {
    println!(" k   xi            sup |r_k(x) - |x||");
    for k in [4, 9, 16, 25, 36] {
        let r = newman_abs(k)?;
        let err = r.sup_error_on_grid(f64::abs, 100_000);
        println!(
            "{k:>2}   {:.10}  {err:.3e}   (bound 3 e^-sqrt(k) = {:.3e})",
            attnrat::rational::to_f64(&newman_xi(k)),
            3.0 * (-(k as f64).sqrt()).exp()
        );
    }

    let rho = rational_relu(4)?;
    println!("\nrho_4(x) = ({}) / ({})", rho.numerator(), rho.denominator());
    for x in [int(-1), ratio(-1, 2), int(0), ratio(1, 3), int(1)] {
        println!("  rho_4({}) = {:.6}", format_rational(&x), attnrat::rational::to_f64(&rho.eval(&x)?));
    }

    let wide = scaled_rational_relu(9, &ratio(3, 2))?;
    let (lo, hi) = wide.domain();
    println!(
        "\nscaled to [{}, {}]: sup error {:.3e}",
        format_rational(lo),
        format_rational(hi),
        wide.sup_error_on_grid(|t| t.max(0.0), 100_000)
    );
    Ok(())
}
