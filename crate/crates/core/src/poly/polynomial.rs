use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{CubePolynomial, Monomial};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, ExactRational};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms live in a sorted map, so iteration (and therefore serialization) is
/// deterministic. Zero coefficients are never stored and every variable index is
/// below `arity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Monomial, ExactRational>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: ExactRational) -> Self {
        let mut p = Polynomial::zero(arity);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        Polynomial::constant(arity, BigRational::one())
    }

    pub fn var(arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::VariableOutOfRange { index, arity });
        }
        let mut p = Polynomial::zero(arity);
        p.terms.insert(Monomial::var(index), BigRational::one());
        Ok(p)
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (Monomial, ExactRational)>,
    ) -> Result<Self> {
        let mut p = Polynomial::zero(arity);
        for (m, c) in terms {
            if let Some(index) = m.max_var() {
                if index >= arity {
                    return Err(Error::VariableOutOfRange { index, arity });
                }
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Univariate polynomial `c_0 + c_1 x + ...`.
    pub fn univariate(coeffs: &[ExactRational]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(e, c)| (Monomial::from_exponents([(0, e as u32)]), c.clone()));
        Polynomial::from_terms(1, terms).expect("arity 1")
    }

    /// Dense coefficient vector of a univariate polynomial, lowest degree first.
    pub fn univariate_coefficients(&self) -> Vec<ExactRational> {
        assert!(self.arity <= 1, "univariate_coefficients on arity {}", self.arity);
        let mut out = vec![ExactRational::zero(); self.total_degree() + 1];
        for (m, c) in &self.terms {
            out[m.degree()] = c.clone();
        }
        out
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: ExactRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactRational)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> ExactRational {
        self.terms.get(m).cloned().unwrap_or_else(ExactRational::zero)
    }

    /// The value of a constant polynomial, `None` if any variable occurs.
    pub fn as_constant(&self) -> Option<ExactRational> {
        match self.terms.len() {
            0 => Some(ExactRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Largest exponent sum over the terms; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn check_arity(&self, other: &Polynomial) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    /// Distributive product. Exponents accumulate; no multilinear reduction.
    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        let mut out = Polynomial::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.arity);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, point: &[ExactRational]) -> Result<ExactRational> {
        if point.len() != self.arity {
            return Err(Error::LengthMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut acc = ExactRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.iter() {
                t *= num_traits::pow(point[i].clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation for diagnostics (grid checks), never for verdicts
    /// that must be exact.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.arity, "eval_f64 arity");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .fold(crate::rational::to_f64(c), |t, (i, e)| t * point[i].powi(e as i32))
            })
            .sum()
    }

    /// Canonical multilinear representative: every exponent `e >= 1` becomes 1.
    /// Agrees with `self` on every point of `{0,1}^arity`.
    pub fn multilinear_reduce(&self) -> CubePolynomial {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.multilinear(), c.clone());
        }
        CubePolynomial::from_multilinear_unchecked(out)
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(Monomial::is_multilinear)
    }

    /// Same polynomial viewed over `arity` variables (must not drop a used variable).
    pub fn with_arity(&self, arity: usize) -> Result<Polynomial> {
        Polynomial::from_terms(arity, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn max_abs_coefficient(&self) -> ExactRational {
        crate::rational::max_abs(self.terms.values().cloned())
    }

    pub(crate) fn coefficients(&self) -> impl Iterator<Item = &ExactRational> {
        self.terms.values()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

// JSON form: {"arity": n, "terms": [{"exps": {"i": e}, "num": "..", "den": ".."}]}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    arity: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Exponents,
    num: String,
    den: String,
}

/// Exponent map keyed by the decimal variable index, written in numeric order.
struct Exponents(Vec<(usize, u32)>);

impl Serialize for Exponents {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, e) in &self.0 {
            map.serialize_entry(&i.to_string(), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, u32>::deserialize(d)?;
        let mut out = Vec::with_capacity(raw.len());
        for (k, e) in raw {
            let i = k
                .parse::<usize>()
                .map_err(|_| serde::de::Error::custom(format!("bad variable index {k:?}")))?;
            out.push((i, e));
        }
        Ok(Exponents(out))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    exps: Exponents(m.iter().collect()),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let c = parse_rational(&format!("{}/{}", t.num, t.den)).map_err(serde::de::Error::custom)?;
            terms.push((Monomial::from_exponents(t.exps.0), c));
        }
        Polynomial::from_terms(raw.arity, terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn x(arity: usize, i: usize) -> Polynomial {
        Polynomial::var(arity, i).unwrap()
    }

    fn c(arity: usize, v: i64) -> Polynomial {
        Polynomial::constant(arity, int(v))
    }

    #[test]
    fn add_examples() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        assert_eq!((&x1 + &x2).len(), 2);
        assert!((&x1 + &(-&x1)).is_zero());
        let lhs = &(&(&x1 * &x2).scale(&int(2)) + &c(2, 1)) + &(&x1 * &x2);
        let want = &(&x1 * &x2).scale(&int(3)) + &c(2, 1);
        assert_eq!(lhs, want);
    }

    #[test]
    fn mul_examples() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let sq = &x1 * &x1;
        assert_eq!(sq.terms().next().unwrap().0, &Monomial::from_exponents([(0, 2)]));
        assert_eq!(&(&x1 + &x2) * &(&x1 - &x2), &(&x1 * &x1) - &(&x2 * &x2));
        let p = &x1 + &c(2, 1);
        let want = &(&(&x1 * &x1) + &x1.scale(&int(2))) + &c(2, 1);
        assert_eq!(&p * &p, want);
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            x(2, 0).checked_add(&x(3, 0)),
            Err(Error::ArityMismatch { left: 2, right: 3 })
        ));
        assert!(x(1, 0).checked_mul(&x(2, 0)).is_err());
        assert!(Polynomial::var(2, 2).is_err());
        assert!(x(2, 0).eval(&[int(1)]).is_err());
    }

    #[test]
    fn reduce_examples() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        assert_eq!((&x1 * &x1).multilinear_reduce().as_polynomial(), &x1);
        let p = &(&x1.pow(2) * &x2.pow(3)) + &x1;
        assert_eq!(p.multilinear_reduce().as_polynomial(), &(&(&x1 * &x2) + &x1));
        let s = (&x1 + &x2).pow(2).multilinear_reduce();
        let want = &(&x1 + &x2) + &(&x1 * &x2).scale(&int(2));
        assert_eq!(s.as_polynomial(), &want);
    }

    #[test]
    fn eval_and_degree() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        assert_eq!((&x1 * &x2).scale(&int(2)).eval(&[int(1), int(1)]).unwrap(), int(2));
        let p = &(&x1 * &x1) + &x2;
        assert_eq!(p.eval(&[ratio(1, 2), ratio(1, 3)]).unwrap(), ratio(7, 12));
        assert_eq!(Polynomial::zero(2).eval(&[ratio(3, 7), int(9)]).unwrap(), int(0));

        let x3 = x(3, 2);
        let q = &(&x(3, 0) * &x(3, 1)).scale(&int(3)) + &x3;
        assert_eq!(q.total_degree(), 2);
        assert_eq!(c(3, 5).total_degree(), 0);
        assert_eq!((&x(2, 0).pow(3) * &x(2, 1)).total_degree(), 4);
        assert_eq!(Polynomial::zero(4).total_degree(), 0);
    }

    #[test]
    fn json_shape() {
        let p = &(&x(11, 10) * &x(11, 2)).scale(&ratio(-3, 4)) + &c(11, 1);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"arity":11,"terms":[{"exps":{},"num":"1","den":"1"},{"exps":{"2":1,"10":1},"num":"-3","den":"4"}]}"#
        );
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"arity":1,"terms":[{"exps":{"3":1},"num":"1","den":"1"}]}"#;
        assert!(serde_json::from_str::<Polynomial>(bad).is_err());
    }

    #[test]
    fn display() {
        let p = &(&x(2, 0) * &x(2, 1)).scale(&ratio(-1, 2)) + &c(2, 3);
        assert_eq!(p.to_string(), "3 - 1/2*x1*x2");
    }
}
