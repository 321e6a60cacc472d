use num_traits::{One, Zero};

use crate::attention::{uniform_mean_head, LayerSpec, PostProcessing, RationalPost};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{int, ExactRational};

/// Coefficients (constant first) of the Lagrange interpolant through `points`.
pub fn lagrange_interpolant(points: &[(ExactRational, ExactRational)]) -> Vec<ExactRational> {
    let mut out = vec![ExactRational::zero(); points.len()];
    for (k, (xk, yk)) in points.iter().enumerate() {
        // basis polynomial prod_{j != k} (z - x_j) / (x_k - x_j)
        let mut basis = vec![ExactRational::one()];
        let mut scale = yk.clone();
        for (j, (xj, _)) in points.iter().enumerate() {
            if j == k {
                continue;
            }
            let mut next = vec![ExactRational::zero(); basis.len() + 1];
            for (i, c) in basis.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * xj;
            }
            basis = next;
            scale /= xk - xj;
        }
        for (o, c) in out.iter_mut().zip(basis) {
            *o += c * &scale;
        }
    }
    out
}

/// `u` of degree `n` with `u(k/n) = (-1)^{k+1}` for `k = 0..=n`.
pub fn parity_interpolant(n: usize) -> Polynomial {
    let points: Vec<_> = (0..=n)
        .map(|k| {
            let y = if k % 2 == 1 { int(1) } else { int(-1) };
            (ExactRational::new(k.into(), n.into()), y)
        })
        .collect();
    Polynomial::univariate(&lagrange_interpolant(&points))
}

/// One uniform-weight head producing the bit mean `k/n`, post-processed by
/// [`parity_interpolant`] with declared `p = n`.
pub fn build_parity_layer(n: usize) -> Result<LayerSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("parity layer needs n >= 1".into()));
    }
    LayerSpec::new(
        vec![uniform_mean_head(n)],
        PostProcessing::Rational(RationalPost {
            numerator: parity_interpolant(n),
            denominator: Polynomial::one(1),
            degree_bound: n,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::bits_of;
    use crate::rational::ratio;

    #[test]
    fn small_interpolants() {
        assert_eq!(parity_interpolant(1), Polynomial::univariate(&[int(-1), int(2)]));
        assert_eq!(parity_interpolant(2), Polynomial::univariate(&[int(-1), int(8), int(-8)]));
    }

    #[test]
    fn layer_values() {
        let layer = build_parity_layer(2).unwrap();
        let values: Vec<_> = (0..4).map(|i| layer.eval(&bits_of(2, i)).unwrap()).collect();
        assert_eq!(values, vec![int(-1), int(1), int(1), int(-1)]);
        let layer = build_parity_layer(1).unwrap();
        assert_eq!(layer.eval(&[false]).unwrap(), int(-1));
        assert_eq!(layer.eval(&[true]).unwrap(), int(1));
    }

    #[test]
    fn interpolant_hits_nodes() {
        let u = parity_interpolant(7);
        for k in 0..=7 {
            let expect = if k % 2 == 1 { int(1) } else { int(-1) };
            assert_eq!(u.eval(&[ratio(k, 7)]).unwrap(), expect);
        }
        assert_eq!(u.total_degree(), 7);
    }
}
