//! Lowering of heads and layers to rational functions on `{0,1}^n`.
//!
//! Each head coordinate becomes `N_k / D` with `N_k, D` of degree at most 2 and
//! `D > 0` on the cube. A layer with `h` heads puts the heads over the common
//! denominator `S = D_1 ... D_h`, and a post-processing `P / Q` of declared
//! degree `p` is lifted through the homogenized substitution
//! `P~ = sum_a c_a M^a S^(p - |a|)`, so the layer equals `P~ / Q~` on the cube
//! with both parts of degree at most `2hp`.
//!
//! All intermediate products are reduced to multilinear form eagerly; reduction
//! never increases degree, so achieved degrees stay below the unreduced bounds.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attention::{HeadSpec, LayerSpec};
use crate::error::{Error, Result};
use crate::poly::{bits_of, bitstring, CubePolynomial, Monomial, Polynomial, DENSE_MAX_VARS};
use crate::rational::{format_rational, int, ExactRational};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

/// `(1 - a + (2a - 1) x_n) (1 - b + (2b - 1) x_i)`, unreduced.
///
/// On the cube this is 1 exactly when `(x_n, x_i) = (a, b)`. When `idx_n ==
/// idx_i` the product contains `x_n^2`.
pub fn indicator_poly(a: bool, b: bool, idx_n: usize, idx_i: usize, arity: usize) -> Result<Polynomial> {
    let factor = |bit: bool, idx: usize| -> Result<Polynomial> {
        let x = Polynomial::var(arity, idx)?;
        let (c0, c1) = if bit { (0, 1) } else { (1, -1) };
        Ok(&Polynomial::constant(arity, int(c0)) + &x.scale(&int(c1)))
    };
    Ok(&factor(a, idx_n)? * &factor(b, idx_i)?)
}

/// Numerators `N_1..N_d` and shared denominator `D` of one head.
#[derive(Clone, Debug, PartialEq)]
pub struct LoweredHead {
    pub numerators: Vec<CubePolynomial>,
    pub denominator: CubePolynomial,
}

pub fn head_to_rational(head: &HeadSpec) -> LoweredHead {
    let (n, d) = (head.n(), head.d());
    let last = n - 1;
    let mut num = vec![Polynomial::zero(n); d];
    let mut den = Polynomial::zero(n);
    for i in 0..n {
        for a in [false, true] {
            for b in [false, true] {
                let ind = indicator_poly(a, b, last, i, n).expect("indices < n");
                let w = head.weight(i, a, b);
                den = &den + &ind.scale(w);
                for (k, v) in head.value(i, b).iter().enumerate() {
                    if !v.is_zero() {
                        num[k] = &num[k] + &ind.scale(&(w * v));
                    }
                }
            }
        }
    }
    LoweredHead {
        numerators: num.iter().map(Polynomial::multilinear_reduce).collect(),
        denominator: den.multilinear_reduce(),
    }
}

/// `S = prod_j D_j` and `M_k = sum_j N_{j,k} prod_{l != j} D_l`.
pub fn common_denominator(heads: &[LoweredHead]) -> Result<(CubePolynomial, Vec<CubePolynomial>)> {
    let first = heads
        .first()
        .ok_or_else(|| Error::InvalidParameter("no heads to combine".into()))?;
    let (n, d) = (first.denominator.n(), first.numerators.len());
    for h in heads {
        if h.denominator.n() != n || h.numerators.len() != d {
            return Err(Error::InvalidParameter(format!(
                "head dimensions (n={}, d={}) differ from (n={n}, d={d})",
                h.denominator.n(),
                h.numerators.len()
            )));
        }
    }
    let h = heads.len();
    let one = CubePolynomial::constant(n, ExactRational::one());
    // prefix[j] = D_1..D_j, suffix[j] = D_{j+1}..D_h
    let mut prefix = vec![one.clone()];
    for head in heads {
        let next = prefix.last().unwrap().checked_mul(&head.denominator)?;
        prefix.push(next);
    }
    let mut suffix = vec![one; h + 1];
    for j in (0..h).rev() {
        suffix[j] = heads[j].denominator.checked_mul(&suffix[j + 1])?;
    }
    let s = prefix[h].clone();
    let mut m = vec![CubePolynomial::zero(n); d];
    for (j, head) in heads.iter().enumerate() {
        let others = prefix[j].checked_mul(&suffix[j + 1])?;
        for (k, nk) in head.numerators.iter().enumerate() {
            if !nk.is_zero() {
                m[k] = m[k].checked_add(&nk.checked_mul(&others)?)?;
            }
        }
    }
    Ok((s, m))
}

/// Homogenized lift `sum_a c_a (prod_k M_k^a_k) S^(p - |a|)` of `P` (multilinear-reduced).
pub fn homogenize_compose(
    p: &Polynomial,
    m: &[CubePolynomial],
    s: &CubePolynomial,
    degree: usize,
) -> Result<CubePolynomial> {
    if p.arity() != m.len() {
        return Err(Error::ArityMismatch {
            left: p.arity(),
            right: m.len(),
        });
    }
    if p.total_degree() > degree {
        return Err(Error::DegreeBoundViolated {
            declared: degree,
            actual: p.total_degree(),
        });
    }
    let n = s.n();
    if let Some(bad) = m.iter().find(|mk| mk.n() != n) {
        return Err(Error::ArityMismatch {
            left: n,
            right: bad.n(),
        });
    }
    let s_pows = powers(s, degree);
    let mut max_exp = vec![0u32; m.len()];
    for (mono, _) in p.terms() {
        for (k, e) in mono.iter() {
            max_exp[k] = max_exp[k].max(e);
        }
    }
    let m_pows: Vec<Vec<CubePolynomial>> = m
        .iter()
        .zip(&max_exp)
        .map(|(mk, &e)| powers(mk, e as usize))
        .collect();
    let mut out = CubePolynomial::zero(n);
    for (mono, c) in p.terms() {
        let mut term = s_pows[degree - mono.degree()].scale(c);
        for (k, e) in mono.iter() {
            term = term.checked_mul(&m_pows[k][e as usize])?;
        }
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

fn powers(base: &CubePolynomial, max: usize) -> Vec<CubePolynomial> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(CubePolynomial::constant(base.n(), ExactRational::one()));
    for e in 1..=max {
        let next = out[e - 1].checked_mul(base).expect("same n");
        out.push(next);
    }
    out
}

/// `numerator / denominator` on `{0,1}^n` with the denominator nonzero on the cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CubeRationalFunction {
    pub numerator: CubePolynomial,
    pub denominator: CubePolynomial,
    /// True when the denominator is known to be positive on every cube point.
    pub denominator_positive: bool,
}

impl CubeRationalFunction {
    /// Checks the denominator on every cube point when `n <= cap`. Above the cap
    /// the caller vouches for nonvanishing and `denominator_positive` is false.
    pub fn new(numerator: CubePolynomial, denominator: CubePolynomial, cap: usize) -> Result<Self> {
        if numerator.n() != denominator.n() {
            return Err(Error::ArityMismatch {
                left: numerator.n(),
                right: denominator.n(),
            });
        }
        let n = denominator.n();
        let mut positive = false;
        if n <= cap {
            let values = cube_values(&denominator)?;
            if let Some(idx) = values.iter().position(Zero::is_zero) {
                return Err(Error::DenominatorVanished {
                    point: bitstring(&bits_of(n, idx)),
                });
            }
            positive = values.iter().all(Signed::is_positive);
        }
        Ok(CubeRationalFunction {
            numerator,
            denominator,
            denominator_positive: positive,
        })
    }

    pub fn n(&self) -> usize {
        self.numerator.n()
    }

    pub fn num_degree(&self) -> usize {
        self.numerator.total_degree()
    }

    pub fn den_degree(&self) -> usize {
        self.denominator.total_degree()
    }

    pub fn eval_bits(&self, x: &[bool]) -> Result<ExactRational> {
        let q = self.denominator.eval_bits(x)?;
        if q.is_zero() {
            return Err(Error::DenominatorVanished { point: bitstring(x) });
        }
        Ok(self.numerator.eval_bits(x)? / q)
    }

    /// Values on the whole cube, `x_1` as the least significant index bit.
    pub fn cube_values(&self) -> Result<Vec<ExactRational>> {
        let num = cube_values(&self.numerator)?;
        let den = cube_values(&self.denominator)?;
        num.into_iter()
            .zip(den)
            .enumerate()
            .map(|(idx, (p, q))| {
                if q.is_zero() {
                    Err(Error::DenominatorVanished {
                        point: bitstring(&bits_of(self.n(), idx)),
                    })
                } else {
                    Ok(p / q)
                }
            })
            .collect()
    }

    /// Sign of the function at each cube point (`-1`, `0`, `1`), without division.
    pub fn cube_signs(&self) -> Result<Vec<i8>> {
        let n = self.numerator.n();
        if n > DENSE_MAX_VARS {
            return Err(Error::CapExceeded { n, cap: DENSE_MAX_VARS });
        }
        // the scales are positive, so integer values carry the right signs
        let (num, _) = self.numerator.integer_cube_values();
        let (den, _) = self.denominator.integer_cube_values();
        Ok(num
            .iter()
            .zip(&den)
            .map(|(p, q)| int_sign(p) * int_sign(q))
            .collect())
    }
}

fn int_sign(v: &BigInt) -> i8 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn cube_values(p: &CubePolynomial) -> Result<Vec<ExactRational>> {
    if p.n() <= DENSE_MAX_VARS {
        return p.cube_values();
    }
    Err(Error::CapExceeded {
        n: p.n(),
        cap: DENSE_MAX_VARS,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NonvanishingCertificate {
    /// Every cube point was evaluated.
    Exhaustive,
    /// `Q` is a nonzero constant, so `Q~ = Q S^p` has the sign of `Q`.
    ConstantDenominator,
    /// Above the cap; the caller asserted nonvanishing.
    Asserted,
}

#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    pub cap: usize,
    pub assume_nonvanishing: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            cap: DEFAULT_EXHAUSTIVE_CAP,
            assume_nonvanishing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledLayer {
    pub function: CubeRationalFunction,
    pub heads: usize,
    pub declared_p: usize,
    pub certificate: NonvanishingCertificate,
}

impl CompiledLayer {
    /// `2hp` for the declared `p`.
    pub fn degree_bound(&self) -> usize {
        2 * self.heads * self.declared_p
    }
}

/// Compiles a layer with rational post-processing to `P~ / Q~` on the cube.
pub fn compile_layer(layer: &LayerSpec, opts: &CompileOptions) -> Result<CompiledLayer> {
    let post = layer
        .rational_post()
        .ok_or_else(|| Error::InvalidSpec("compile_layer needs rational post-processing".into()))?;
    let n = layer.n();
    let constant_q = post.denominator.as_constant();
    let certificate = if n <= opts.cap {
        NonvanishingCertificate::Exhaustive
    } else if constant_q.is_some() {
        NonvanishingCertificate::ConstantDenominator
    } else if opts.assume_nonvanishing {
        NonvanishingCertificate::Asserted
    } else {
        return Err(Error::UncertifiedDenominator { n, cap: opts.cap });
    };

    let lowered: Vec<LoweredHead> = layer.heads().iter().map(head_to_rational).collect();
    let (s, m) = common_denominator(&lowered)?;
    let p = post.degree_bound;
    let num = homogenize_compose(&post.numerator, &m, &s, p)?;
    let den = homogenize_compose(&post.denominator, &m, &s, p)?;
    let mut function = CubeRationalFunction::new(num, den, opts.cap)?;
    if let (NonvanishingCertificate::ConstantDenominator, Some(q)) = (certificate, constant_q) {
        function.denominator_positive = q.is_positive();
    }
    Ok(CompiledLayer {
        function,
        heads: layer.h(),
        declared_p: p,
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub x: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of an exhaustive comparison between a layer and its compiled form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceReport {
    pub degree_bound: usize,
    pub achieved_num_degree: usize,
    pub achieved_den_degree: usize,
    pub equivalence_checked: bool,
    pub points_checked: u64,
    pub mismatch: Option<Mismatch>,
}

impl EquivalenceReport {
    pub fn success(&self) -> bool {
        self.equivalence_checked && self.mismatch.is_none()
    }

    pub fn within_degree_bound(&self) -> bool {
        self.achieved_num_degree <= self.degree_bound && self.achieved_den_degree <= self.degree_bound
    }
}

/// Compares `layer.eval(x)` against `compiled(x)` on all `2^n` points when
/// `n <= cap`; a mismatch is a report outcome, not an error.
pub fn verify_equivalence(
    layer: &LayerSpec,
    compiled: &CubeRationalFunction,
    cap: usize,
) -> Result<EquivalenceReport> {
    let n = layer.n();
    if compiled.n() != n {
        return Err(Error::ArityMismatch {
            left: n,
            right: compiled.n(),
        });
    }
    let p = layer.rational_post().map(|r| r.degree_bound).unwrap_or(0);
    let mut report = EquivalenceReport {
        degree_bound: 2 * layer.h() * p,
        achieved_num_degree: compiled.num_degree(),
        achieved_den_degree: compiled.den_degree(),
        equivalence_checked: false,
        points_checked: 0,
        mismatch: None,
    };
    if n > cap || n > DENSE_MAX_VARS {
        return Ok(report);
    }
    let num = cube_values(&compiled.numerator)?;
    let den = cube_values(&compiled.denominator)?;
    let first_bad = (0..1usize << n).into_par_iter().find_first(|&idx| {
        let x = bits_of(n, idx);
        match layer.eval(&x) {
            Ok(v) => den[idx].is_zero() || v * &den[idx] != num[idx],
            Err(_) => true,
        }
    });
    report.equivalence_checked = true;
    report.points_checked = 1u64 << n;
    if let Some(idx) = first_bad {
        let x = bits_of(n, idx);
        let lhs = layer
            .eval(&x)
            .map(|v| format_rational(&v))
            .unwrap_or_else(|_| "undefined".into());
        let rhs = if den[idx].is_zero() {
            "undefined".into()
        } else {
            format_rational(&(&num[idx] / &den[idx]))
        };
        report.mismatch = Some(Mismatch {
            x: bitstring(&x),
            lhs,
            rhs,
        });
    }
    Ok(report)
}

/// Adds `delta` to the constant term of the numerator (test helper for
/// exercising mismatch reporting).
pub fn perturb_numerator(f: &CubeRationalFunction, delta: &ExactRational) -> CubeRationalFunction {
    let bump = CubePolynomial::new(
        Polynomial::from_terms(f.n(), [(Monomial::one(), delta.clone())]).expect("constant"),
    )
    .expect("multilinear");
    CubeRationalFunction {
        numerator: f.numerator.checked_add(&bump).expect("same n"),
        ..f.clone()
    }
}
