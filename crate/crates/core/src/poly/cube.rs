use std::collections::HashMap;
use std::fmt;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, ExactRational};

/// Largest `n` for which whole-cube value vectors (`2^n` entries) are built.
pub const DENSE_MAX_VARS: usize = 24;

/// Multilinear polynomial over `{0,1}^n`: every stored monomial is squarefree.
///
/// Two cube polynomials are equal as functions on the cube exactly when they are
/// equal as polynomials, so this is a canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubePolynomial(Polynomial);

impl CubePolynomial {
    pub(crate) fn from_multilinear_unchecked(p: Polynomial) -> Self {
        debug_assert!(p.is_multilinear());
        CubePolynomial(p)
    }

    /// Wraps a polynomial that is already multilinear.
    pub fn new(p: Polynomial) -> Result<Self> {
        if !p.is_multilinear() {
            return Err(Error::InvalidParameter(
                "cube polynomial must be multilinear".into(),
            ));
        }
        Ok(CubePolynomial(p))
    }

    pub fn zero(n: usize) -> Self {
        CubePolynomial(Polynomial::zero(n))
    }

    pub fn constant(n: usize, c: ExactRational) -> Self {
        CubePolynomial(Polynomial::constant(n, c))
    }

    pub fn var(n: usize, i: usize) -> Result<Self> {
        Ok(CubePolynomial(Polynomial::var(n, i)?))
    }

    pub fn n(&self) -> usize {
        self.0.arity()
    }

    pub fn as_polynomial(&self) -> &Polynomial {
        &self.0
    }

    pub fn into_polynomial(self) -> Polynomial {
        self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.total_degree()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn checked_add(&self, other: &CubePolynomial) -> Result<CubePolynomial> {
        Ok(CubePolynomial(self.0.checked_add(&other.0)?))
    }

    pub fn checked_sub(&self, other: &CubePolynomial) -> Result<CubePolynomial> {
        Ok(CubePolynomial(self.0.checked_sub(&other.0)?))
    }

    pub fn scale(&self, c: &ExactRational) -> CubePolynomial {
        CubePolynomial(self.0.scale(c))
    }

    /// Product followed by multilinear reduction.
    ///
    /// Dense operands on small cubes are multiplied pointwise in value space
    /// (zeta transform, Hadamard product, Moebius transform); otherwise the
    /// sparse product of supports is used. Both give the same canonical result.
    pub fn checked_mul(&self, other: &CubePolynomial) -> Result<CubePolynomial> {
        let n = self.n();
        if n != other.n() {
            return Err(Error::ArityMismatch {
                left: n,
                right: other.n(),
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(CubePolynomial::zero(n));
        }
        let sparse_cost = self.len().saturating_mul(other.len());
        if n <= DENSE_MAX_VARS && sparse_cost > (n + 1) << n {
            return Ok(self.mul_dense(other));
        }
        if n <= 64 {
            return Ok(self.mul_sparse_masks(other));
        }
        Ok(self.0.checked_mul(&other.0)?.multilinear_reduce())
    }

    fn mul_dense(&self, other: &CubePolynomial) -> CubePolynomial {
        let (mut a, sa) = self.integer_cube_values();
        let (b, sb) = other.integer_cube_values();
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        moebius(&mut a);
        let scale = sa * sb;
        let coeffs = a.into_iter().map(|c| ExactRational::new(c, scale.clone())).collect();
        CubePolynomial::from_coefficient_vector(self.n(), coeffs)
    }

    /// Sparse product with squarefree monomials encoded as bit masks.
    pub(crate) fn mul_sparse_masks(&self, other: &CubePolynomial) -> CubePolynomial {
        let a: Vec<(u64, &ExactRational)> =
            self.0.terms().map(|(m, c)| (m.support_mask(), c)).collect();
        let b: Vec<(u64, &ExactRational)> =
            other.0.terms().map(|(m, c)| (m.support_mask(), c)).collect();
        let mut acc: HashMap<u64, ExactRational> = HashMap::with_capacity(a.len() + b.len());
        for &(ma, ca) in &a {
            for &(mb, cb) in &b {
                let prod = ca * cb;
                acc.entry(ma | mb)
                    .and_modify(|v| *v += &prod)
                    .or_insert(prod);
            }
        }
        let terms = acc.into_iter().map(|(m, c)| (Monomial::from_mask(m), c));
        CubePolynomial(Polynomial::from_terms(self.n(), terms).expect("indices < n"))
    }

    pub fn pow(&self, e: u32) -> CubePolynomial {
        let mut result = CubePolynomial::constant(self.n(), num_traits::One::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&base).expect("same n");
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base).expect("same n");
            }
        }
        result
    }

    pub fn eval(&self, point: &[ExactRational]) -> Result<ExactRational> {
        self.0.eval(point)
    }

    /// Value at a cube point given as bits `x_1..x_n`.
    pub fn eval_bits(&self, x: &[bool]) -> Result<ExactRational> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        let mut acc = ExactRational::zero();
        for (m, c) in self.0.terms() {
            if m.iter().all(|(i, _)| x[i]) {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// Values on all `2^n` cube points, indexed with `x_1` as the least
    /// significant bit.
    pub fn cube_values(&self) -> Result<Vec<ExactRational>> {
        if self.n() > DENSE_MAX_VARS {
            return Err(Error::CapExceeded {
                n: self.n(),
                cap: DENSE_MAX_VARS,
            });
        }
        Ok(self.cube_values_unchecked())
    }

    fn cube_values_unchecked(&self) -> Vec<ExactRational> {
        let (v, scale) = self.integer_cube_values();
        v.into_iter().map(|c| ExactRational::new(c, scale.clone())).collect()
    }

    /// `L * self` on every cube point, for the positive integer `L` (returned
    /// second) clearing all coefficient denominators. Signs and zeros match
    /// [`CubePolynomial::cube_values`]. Requires `n <= DENSE_MAX_VARS`.
    pub fn integer_cube_values(&self) -> (Vec<BigInt>, BigInt) {
        assert!(self.n() <= DENSE_MAX_VARS, "dense evaluation above {DENSE_MAX_VARS} variables");
        let scale = lcm_of_denominators(self.0.coefficients());
        let mut v = vec![BigInt::zero(); 1usize << self.n()];
        for (m, c) in self.0.terms() {
            v[m.support_mask() as usize] = (c * &scale).to_integer();
        }
        zeta(&mut v);
        (v, scale)
    }

    /// Unique multilinear polynomial taking the given values on the cube.
    pub fn from_cube_values(n: usize, values: &[ExactRational]) -> Result<CubePolynomial> {
        if n > DENSE_MAX_VARS {
            return Err(Error::CapExceeded {
                n,
                cap: DENSE_MAX_VARS,
            });
        }
        if values.len() != 1usize << n {
            return Err(Error::LengthMismatch {
                expected: 1usize << n,
                got: values.len(),
            });
        }
        let mut v = values.to_vec();
        moebius(&mut v);
        Ok(CubePolynomial::from_coefficient_vector(n, v))
    }

    fn from_coefficient_vector(n: usize, v: Vec<ExactRational>) -> CubePolynomial {
        let terms = v
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (Monomial::from_mask(m as u64), c));
        CubePolynomial(Polynomial::from_terms(n, terms).expect("indices < n"))
    }
}

/// Subset-sum transform: `v[S] <- sum_{T subset of S} v[T]`.
fn zeta<T: for<'a> AddAssign<&'a T>>(v: &mut [T]) {
    let len = v.len();
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                let (lo, hi) = v.split_at_mut(s);
                hi[0] += &lo[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`zeta`].
fn moebius<T: for<'a> SubAssign<&'a T>>(v: &mut [T]) {
    let len = v.len();
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                let (lo, hi) = v.split_at_mut(s);
                hi[0] -= &lo[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

impl fmt::Display for CubePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for CubePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = Polynomial::deserialize(d)?;
        CubePolynomial::new(p).map_err(serde::de::Error::custom)
    }
}

/// Bits `x_1..x_n` of the cube point with the given index (`x_1` least significant).
pub fn bits_of(n: usize, index: usize) -> Vec<bool> {
    (0..n).map(|i| index >> i & 1 == 1).collect()
}

/// Renders a cube point as the string `x_1 x_2 ... x_n` of `0`/`1` characters.
pub fn bitstring(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn values_roundtrip() {
        let p = Polynomial::from_terms(
            3,
            [
                (Monomial::one(), int(2)),
                (Monomial::from_mask(0b101), int(-3)),
                (Monomial::from_mask(0b010), int(5)),
            ],
        )
        .unwrap();
        let c = CubePolynomial::new(p).unwrap();
        let v = c.cube_values().unwrap();
        for (idx, val) in v.iter().enumerate() {
            assert_eq!(val, &c.eval_bits(&bits_of(3, idx)).unwrap());
        }
        assert_eq!(CubePolynomial::from_cube_values(3, &v).unwrap(), c);
    }

    #[test]
    fn dense_and_sparse_agree() {
        let n = 4;
        let mut a = CubePolynomial::constant(n, int(1));
        let mut b = CubePolynomial::constant(n, int(-2));
        for i in 0..n {
            let xi = CubePolynomial::var(n, i).unwrap();
            a = a.checked_add(&xi.scale(&int(i as i64 + 1))).unwrap();
            b = b.checked_add(&xi.scale(&int(3 - i as i64))).unwrap();
        }
        let a2 = a.mul_sparse_masks(&a);
        let prod_sparse = a2.mul_sparse_masks(&b);
        let prod_dense = a2.mul_dense(&b);
        assert_eq!(prod_sparse, prod_dense);
        assert_eq!(a.pow(3), a2.mul_sparse_masks(&a));
    }

    #[test]
    fn rejects_non_multilinear() {
        let x = Polynomial::var(1, 0).unwrap();
        assert!(CubePolynomial::new(&x * &x).is_err());
    }
}
