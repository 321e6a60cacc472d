//! Exact polynomial arithmetic and multilinear reduction on the cube.

use attnrat::poly::{bits_of, bitstring};
use attnrat::rational::{format_rational, int, ratio};
use attnrat::{CubePolynomial, Polynomial};

fn main() -> attnrat::Result<()> {
    let x = Polynomial::var(3, 0)?;
    let y = Polynomial::var(3, 1)?;
    let z = Polynomial::var(3, 2)?;

    let p = &(&x + &y.scale(&ratio(1, 2))) * &(&x - &z);
    println!("p        = {p}");
    println!("deg p    = {}", p.total_degree());

    // x_i^2 = x_i on {0,1}, so p collapses to a multilinear form
    let q = p.multilinear_reduce();
    println!("reduced  = {q}");

    for idx in 0..8 {
        let bits = bits_of(3, idx);
        println!("  q({}) = {}", bitstring(&bits), format_rational(&q.eval_bits(&bits)?));
    }

    let cube = q.cube_values()?;
    let back = CubePolynomial::from_cube_values(3, &cube)?;
    assert_eq!(back, q);

    let s = CubePolynomial::var(3, 0)?.checked_add(&CubePolynomial::constant(3, int(-1)))?;
    println!("(x1 - 1)^5 on the cube = {}", s.pow(5));
    Ok(())
}
