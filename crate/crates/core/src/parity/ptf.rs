//! Polynomial-threshold degree of Boolean functions by exact linear feasibility.

use crate::error::{Error, Result};
use crate::poly::{CubePolynomial, Monomial, Polynomial};
use crate::rational::{int, ExactRational};

use super::simplex::{feasible_free, Feasibility};
use super::table::{parity, BooleanTable};

/// Largest `n` accepted by [`ptf_parity_feasible`].
pub const PTF_MAX_N: usize = 4;

fn sign_of(bit: bool) -> ExactRational {
    int(if bit { 1 } else { -1 })
}

/// A multilinear `f` of degree `<= k` with `(2g(x) - 1) f(x) >= 1` on the cube, if any.
pub fn ptf_witness(g: &BooleanTable, k: usize) -> Option<CubePolynomial> {
    let n = g.n();
    let masks: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize <= k).collect();
    let rows: Vec<Vec<ExactRational>> = (0..1usize << n)
        .map(|x| {
            let s = sign_of(g.get(x));
            masks
                .iter()
                .map(|&m| if (x as u64) & m == m { s.clone() } else { int(0) })
                .collect()
        })
        .collect();
    let rhs = vec![int(1); rows.len()];
    match feasible_free(&rows, &rhs) {
        Feasibility::Infeasible => None,
        Feasibility::Feasible(c) => {
            let terms = masks.iter().zip(c).map(|(&m, v)| (Monomial::from_mask(m), v));
            let poly = Polynomial::from_terms(n, terms).expect("masks are within arity");
            Some(CubePolynomial::new(poly).expect("mask monomials are multilinear"))
        }
    }
}

/// Whether parity on `n` bits is sign-represented by a degree-`k` polynomial.
pub fn ptf_parity_feasible(n: usize, k: usize) -> Result<bool> {
    if n > PTF_MAX_N {
        return Err(Error::CapExceeded { n, cap: PTF_MAX_N });
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("degree {k} exceeds n = {n}")));
    }
    Ok(ptf_witness(&parity(n), k).is_some())
}

/// Symmetrized question: a univariate `q` of degree `<= k` with
/// `(-1)^{t+1} q(t) >= 1` for `t = 0..=n`.
pub fn symmetric_parity_feasible(n: usize, k: usize) -> bool {
    let rows: Vec<Vec<ExactRational>> = (0..=n)
        .map(|t| {
            let s = sign_of(t % 2 == 1);
            (0..=k).map(|j| &s * int(t as i64).pow(j as i32)).collect()
        })
        .collect();
    let rhs = vec![int(1); n + 1];
    feasible_free(&rows, &rhs).is_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::table::sign_represents;

    #[test]
    fn spec_examples() {
        assert!(!ptf_parity_feasible(2, 1).unwrap());
        assert!(ptf_parity_feasible(2, 2).unwrap());
        assert!(!ptf_parity_feasible(3, 2).unwrap());
        assert!(matches!(ptf_parity_feasible(5, 5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn witness_sign_represents() {
        for n in 1..=4 {
            let g = parity(n);
            let w = ptf_witness(&g, n).expect("degree n suffices");
            assert!(w.total_degree() <= n);
            let values = crate::parity::RealTable::new(n, w.cube_values().unwrap()).unwrap();
            assert!(sign_represents(&values, &g).unwrap());
        }
    }

    #[test]
    fn symmetrization_agrees() {
        for n in 1..=PTF_MAX_N {
            for k in 0..=n {
                assert_eq!(ptf_parity_feasible(n, k).unwrap(), symmetric_parity_feasible(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn other_functions() {
        // AND is a threshold of degree 1; a constant needs degree 0
        let and = BooleanTable::from_fn(3, |x| x == 0b111);
        assert!(ptf_witness(&and, 1).is_some());
        assert!(ptf_witness(&and, 0).is_none());
        let one = BooleanTable::from_fn(3, |_| true);
        assert!(ptf_witness(&one, 0).is_some());
    }
}
