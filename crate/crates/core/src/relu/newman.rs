//! Newman's rational approximation of `|x|` and the induced approximation of `relu`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{exp_neg_inv_sqrt, int, to_f64, ExactRational};

/// Bits of relative accuracy of the rounded Newman node `xi`.
pub const XI_RELATIVE_BITS: u32 = 64;

/// Univariate rational function `numerator / denominator` on a closed interval,
/// with the denominator nonvanishing there.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateRational {
    numerator: Polynomial,
    denominator: Polynomial,
    domain: (ExactRational, ExactRational),
    num_f64: Vec<f64>,
    den_f64: Vec<f64>,
}

/// Grid used for the denominator sign check at construction.
const SIGN_CHECK_POINTS: usize = 4097;

impl UnivariateRational {
    pub fn new(
        numerator: Polynomial,
        denominator: Polynomial,
        lo: ExactRational,
        hi: ExactRational,
    ) -> Result<Self> {
        if numerator.arity() != 1 || denominator.arity() != 1 {
            return Err(Error::InvalidParameter("univariate rational needs arity-1 polynomials".into()));
        }
        if lo > hi {
            return Err(Error::InvalidParameter("empty domain".into()));
        }
        let (numerator, denominator) = primitive_fraction(&numerator, &denominator);
        // common rescaling keeps huge integer coefficients inside f64 range
        let top = numerator.max_abs_coefficient().max(denominator.max_abs_coefficient());
        let unit = if top.is_zero() { ExactRational::one() } else { top.recip() };
        let as_f64 = |p: &Polynomial| -> Vec<f64> {
            p.univariate_coefficients().iter().map(|c| to_f64(&(c * &unit))).collect()
        };
        let num_f64 = as_f64(&numerator);
        let den_f64 = as_f64(&denominator);
        let at_lo = denominator.eval(std::slice::from_ref(&lo))?;
        let at_hi = denominator.eval(std::slice::from_ref(&hi))?;
        if at_lo.is_zero() || at_hi.is_zero() || at_lo.is_positive() != at_hi.is_positive() {
            return Err(Error::DenominatorVanished {
                point: "domain endpoint".into(),
            });
        }
        let positive = at_lo.is_positive();
        let (a, b) = (to_f64(&lo), to_f64(&hi));
        for j in 0..SIGN_CHECK_POINTS {
            let x = a + (b - a) * j as f64 / (SIGN_CHECK_POINTS - 1) as f64;
            let q = horner(&den_f64, x);
            if q == 0.0 || (q > 0.0) != positive {
                return Err(Error::DenominatorVanished {
                    point: format!("{x}"),
                });
            }
        }
        Ok(UnivariateRational {
            numerator,
            denominator,
            domain: (lo, hi),
            num_f64,
            den_f64,
        })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn domain(&self) -> &(ExactRational, ExactRational) {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.numerator.total_degree().max(self.denominator.total_degree())
    }

    pub fn eval(&self, x: &ExactRational) -> Result<ExactRational> {
        let q = self.denominator.eval(std::slice::from_ref(x))?;
        if q.is_zero() {
            return Err(Error::DenominatorVanished { point: x.to_string() });
        }
        Ok(self.numerator.eval(std::slice::from_ref(x))? / q)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        horner(&self.num_f64, x) / horner(&self.den_f64, x)
    }

    pub fn denominator_f64(&self, x: f64) -> f64 {
        horner(&self.den_f64, x)
    }

    /// `max |self(x) - target(x)|` over `points` equispaced nodes of the domain.
    pub fn sup_error_on_grid(&self, target: impl Fn(f64) -> f64 + Sync, points: usize) -> f64 {
        let (a, b) = (to_f64(&self.domain.0), to_f64(&self.domain.1));
        let last = points.max(2) - 1;
        (0..=last)
            .into_par_iter()
            .map(|j| {
                let x = a + (b - a) * j as f64 / last as f64;
                (self.eval_f64(x) - target(x)).abs()
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Scales `num / den` to coprime-content integer coefficients (same function).
pub fn primitive_fraction(num: &Polynomial, den: &Polynomial) -> (Polynomial, Polynomial) {
    let all = || num.coefficients().chain(den.coefficients());
    let lcm = crate::rational::lcm_of_denominators(all());
    let scaled_num = num.scale(&ExactRational::from_integer(lcm.clone()));
    let scaled_den = den.scale(&ExactRational::from_integer(lcm));
    let g = crate::rational::gcd_of_numerators(scaled_num.coefficients().chain(scaled_den.coefficients()));
    if g.is_zero() || g == BigInt::one() {
        return (scaled_num, scaled_den);
    }
    let inv = ExactRational::new(BigInt::one(), g);
    (scaled_num.scale(&inv), scaled_den.scale(&inv))
}

/// `p(s x)` for univariate `p`.
fn scale_argument(p: &Polynomial, s: &ExactRational) -> Polynomial {
    let coeffs: Vec<ExactRational> = p
        .univariate_coefficients()
        .into_iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(s.clone(), i))
        .collect();
    Polynomial::univariate(&coeffs)
}

/// Newman node `xi ~ e^{-1/sqrt(k)}`, relative error below `2^-64`.
pub fn newman_xi(k: usize) -> ExactRational {
    exp_neg_inv_sqrt(k as u64, XI_RELATIVE_BITS)
}

/// Newman's approximant `x (p(x) - p(-x)) / (p(x) + p(-x))` with
/// `p(x) = prod_{i=1}^{k-1} (x + xi^i)`, on `[-1, 1]`. Even, zero at 0, degree <= k.
pub fn newman_abs(k: usize) -> Result<UnivariateRational> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("newman_abs needs k >= 2 (got {k})")));
    }
    let xi = newman_xi(k);
    let mut p = Polynomial::one(1);
    let mut power = ExactRational::one();
    for _ in 1..k {
        power *= &xi;
        p = &p * &Polynomial::univariate(&[power.clone(), ExactRational::one()]);
    }
    let p_neg = scale_argument(&p, &int(-1));
    let x = Polynomial::var(1, 0)?;
    let num = &x * &(&p - &p_neg);
    let den = &p + &p_neg;
    UnivariateRational::new(num, den, int(-1), int(1))
}

/// `(x + newman_abs(k)(x)) / 2` on `[-1, 1]`.
pub fn rational_relu(k: usize) -> Result<UnivariateRational> {
    scaled_rational_relu(k, &ExactRational::one())
}

/// `R * rational_relu(k)(t / R)`, approximating `relu` on `[-R, R]` with `R` times
/// the error of [`rational_relu`].
pub fn scaled_rational_relu(k: usize, radius: &ExactRational) -> Result<UnivariateRational> {
    if !radius.is_positive() {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let abs = newman_abs(k)?;
    let x = Polynomial::var(1, 0)?;
    // (x D + N) / (2 D)
    let num = &(&x * abs.denominator()) + abs.numerator();
    let den = abs.denominator().scale(&int(2));
    let inv = radius.recip();
    let num = scale_argument(&num, &inv).scale(radius);
    let den = scale_argument(&den, &inv);
    UnivariateRational::new(num, den, -radius.clone(), radius.clone())
}
