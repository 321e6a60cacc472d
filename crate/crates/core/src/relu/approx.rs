//! Rational approximation of a whole normalized ReLU network.
//!
//! Every non-constant gate is replaced by the same scaled Newman approximant of
//! `relu` on `[-1-eps, 1+eps]`, with per-gate budget `delta = eps / (2 l)`. Gates
//! are 1-Lipschitz in the max-norm, so errors add up layer by layer to at most
//! `l * delta = eps / 2`; the measured sup-error on a grid is reported next to
//! the budget.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::network::{relu, Gate, ReluNetwork};
use super::newman::{primitive_fraction, scaled_rational_relu, UnivariateRational};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{format_rational, int, to_f64, ExactRational};

/// Rational function `numerator / denominator` over `d` real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivariateRational {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl MultivariateRational {
    pub fn arity(&self) -> usize {
        self.numerator.arity()
    }

    /// `max(deg numerator, deg denominator)`.
    pub fn degree(&self) -> usize {
        self.numerator.total_degree().max(self.denominator.total_degree())
    }

    pub fn eval(&self, z: &[ExactRational]) -> Result<ExactRational> {
        let q = self.denominator.eval(z)?;
        if q.is_zero() {
            return Err(Error::DenominatorVanished {
                point: z.iter().map(format_rational).collect::<Vec<_>>().join(","),
            });
        }
        Ok(self.numerator.eval(z)? / q)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ApproximationOptions {
    /// Grid size for choosing `k` and for the final verification.
    pub grid_points: usize,
    /// Largest Newman degree tried per gate.
    pub k_cap: usize,
}

impl Default for ApproximationOptions {
    fn default() -> Self {
        ApproximationOptions {
            grid_points: 100_000,
            k_cap: 128,
        }
    }
}

/// The approximant `v` together with the bookkeeping needed to re-evaluate and
/// audit it.
#[derive(Clone, Debug)]
pub struct NetworkApproximation {
    pub network: ReluNetwork,
    pub rational: MultivariateRational,
    pub epsilon: ExactRational,
    pub gate_budget: ExactRational,
    pub interval_radius: ExactRational,
    /// Newman degree used for non-constant gates (`None` when every gate is constant).
    pub k: Option<usize>,
    /// Per gate: the Newman degree, or 0 for gates short-circuited to constants.
    pub gate_k: Vec<Vec<usize>>,
    pub gate_sup_error: f64,
    pub grid_points: usize,
    pub measured_sup_error: f64,
    gate: Option<UnivariateRational>,
    constant: Vec<Vec<bool>>,
}

impl NetworkApproximation {
    pub fn degree(&self) -> usize {
        self.rational.degree()
    }

    pub fn within_epsilon(&self) -> bool {
        self.measured_sup_error <= to_f64(&self.epsilon)
    }

    /// Evaluates `v` gate by gate in exact arithmetic; equals `rational.eval`.
    pub fn eval_structural(&self, z: &[ExactRational]) -> Result<ExactRational> {
        let mut act = z.to_vec();
        for (l, layer) in self.network.layers().iter().enumerate() {
            let mut next = Vec::with_capacity(layer.len());
            for (g, gate) in layer.iter().enumerate() {
                let t = gate.affine(&act);
                next.push(match (&self.gate, self.constant[l][g]) {
                    (Some(rho), false) => rho.eval(&t)?,
                    _ => relu(t),
                });
            }
            act = next;
        }
        Ok(self.network.readout().affine(&act))
    }

    /// Floating-point gate-by-gate evaluation. Errors if a gate denominator is
    /// not positive at an intermediate value.
    pub fn eval_structural_f64(&self, z: &[f64]) -> Result<f64> {
        let mut act = z.to_vec();
        for (l, layer) in self.network.layers().iter().enumerate() {
            let mut next = Vec::with_capacity(layer.len());
            for (g, gate) in layer.iter().enumerate() {
                let t = gate.affine_f64(&act);
                next.push(match (&self.gate, self.constant[l][g]) {
                    (Some(rho), false) => {
                        if rho.denominator_f64(t) <= 0.0 {
                            return Err(Error::DenominatorVanished {
                                point: format!("{z:?} (gate {} in layer {})", g + 1, l + 1),
                            });
                        }
                        rho.eval_f64(t)
                    }
                    _ => t.max(0.0),
                });
            }
            act = next;
        }
        Ok(self.network.readout().affine_f64(&act))
    }

    pub fn report(&self) -> ApproximationReport {
        ApproximationReport {
            input_dim: self.network.input_dim(),
            width: self.network.width(),
            depth: self.network.depth(),
            epsilon: format_rational(&self.epsilon),
            gate_budget: format_rational(&self.gate_budget),
            interval_radius: format_rational(&self.interval_radius),
            k: self.k,
            gate_k: self.gate_k.clone(),
            achieved_degree: self.degree(),
            numerator_terms: self.rational.numerator.len(),
            denominator_terms: self.rational.denominator.len(),
            grid_points: self.grid_points,
            gate_sup_error_decimal: self.gate_sup_error,
            measured_sup_error_decimal: self.measured_sup_error,
            within_epsilon: self.within_epsilon(),
        }
    }
}

/// JSON summary of a network approximation. `*Decimal` fields are floating-point
/// measurements on the grid.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproximationReport {
    pub input_dim: usize,
    pub width: usize,
    pub depth: usize,
    pub epsilon: String,
    pub gate_budget: String,
    pub interval_radius: String,
    pub k: Option<usize>,
    pub gate_k: Vec<Vec<usize>>,
    pub achieved_degree: usize,
    pub numerator_terms: usize,
    pub denominator_terms: usize,
    pub grid_points: usize,
    pub gate_sup_error_decimal: f64,
    pub measured_sup_error_decimal: f64,
    pub within_epsilon: bool,
}

/// Smallest `k` in `2..=k_cap` whose scaled relu approximant has gridded
/// sup-error at most `budget` on `[-radius, radius]`.
pub fn choose_gate_degree(
    budget: &ExactRational,
    radius: &ExactRational,
    opts: &ApproximationOptions,
) -> Result<(usize, UnivariateRational, f64)> {
    let target = to_f64(budget);
    for k in 2..=opts.k_cap {
        let rho = scaled_rational_relu(k, radius)?;
        let err = rho.sup_error_on_grid(|t| t.max(0.0), opts.grid_points);
        if err <= target {
            return Ok((k, rho, err));
        }
    }
    Err(Error::ApproximationBudgetExceeded {
        k_cap: opts.k_cap,
        budget: target,
    })
}

/// Node of the symbolic forward pass: a rational function of the inputs.
#[derive(Clone)]
struct Node {
    num: Polynomial,
    den: Polynomial,
}

impl Node {
    fn constant(d: usize, c: ExactRational) -> Node {
        Node {
            num: Polynomial::constant(d, c),
            den: Polynomial::one(d),
        }
    }
}

/// `a . inputs + b` over a common denominator; inputs sharing a denominator are
/// grouped first so equal denominators are not multiplied together.
fn affine_combination(gate: &Gate, inputs: &[Node], d: usize) -> Node {
    let mut groups: Vec<(Polynomial, Polynomial)> = Vec::new();
    for (a, node) in gate.a.iter().zip(inputs) {
        if a.is_zero() {
            continue;
        }
        let term = node.num.scale(a);
        match groups.iter_mut().find(|(den, _)| *den == node.den) {
            Some((_, acc)) => *acc = &*acc + &term,
            None => groups.push((node.den.clone(), term)),
        }
    }
    let mut den = Polynomial::one(d);
    let mut num = Polynomial::zero(d);
    for (g_den, g_num) in &groups {
        num = &(&num * g_den) + &(g_num * &den);
        den = &den * g_den;
    }
    num = &num + &den.scale(&gate.b);
    let (num, den) = primitive_fraction(&num, &den);
    Node { num, den }
}

/// `rho(A / B)` as `sum f_i A^i B^(K-i) / sum g_i A^i B^(K-i)`, `K = deg rho`.
fn apply_univariate(rho: &UnivariateRational, input: &Node) -> Node {
    let f = rho.numerator().univariate_coefficients();
    let g = rho.denominator().univariate_coefficients();
    let big_k = rho.degree();
    let d = input.num.arity();
    let mut a_pows = vec![Polynomial::one(d)];
    let mut b_pows = vec![Polynomial::one(d)];
    for i in 1..=big_k {
        a_pows.push(&a_pows[i - 1] * &input.num);
        b_pows.push(&b_pows[i - 1] * &input.den);
    }
    let lift = |coeffs: &[ExactRational]| {
        let mut out = Polynomial::zero(d);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(&a_pows[i] * &b_pows[big_k - i]).scale(c);
            }
        }
        out
    };
    let (num, den) = primitive_fraction(&lift(&f), &lift(&g));
    Node { num, den }
}

/// Replaces every ReLU gate of `net` by a rational approximant so that the
/// composed rational `v` stays within `epsilon` of the network on `[-1, 1]^d`
/// (certified on a grid, see [`NetworkApproximation::within_epsilon`]).
pub fn approximate_network(
    net: &ReluNetwork,
    epsilon: &ExactRational,
    opts: &ApproximationOptions,
) -> Result<NetworkApproximation> {
    if !epsilon.is_positive() || *epsilon > ExactRational::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {}",
            format_rational(epsilon)
        )));
    }
    if opts.grid_points < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let d = net.input_dim();
    let depth = net.depth();
    let radius = ExactRational::one() + epsilon;
    let budget = if depth == 0 {
        epsilon.clone()
    } else {
        epsilon / int(2 * depth as i64)
    };

    // Which gates are constant functions of the input (all live inputs constant).
    let mut constant: Vec<Vec<bool>> = Vec::with_capacity(depth);
    let mut prev_const = vec![false; d];
    for layer in net.layers() {
        let flags: Vec<bool> = layer
            .iter()
            .map(|g| g.a.iter().zip(&prev_const).all(|(a, &c)| a.is_zero() || c))
            .collect();
        prev_const = flags.clone();
        constant.push(flags);
    }
    let needs_gate = constant.iter().flatten().any(|&c| !c);
    let (k, gate, gate_err) = if needs_gate {
        let (k, rho, err) = choose_gate_degree(&budget, &radius, opts)?;
        (Some(k), Some(rho), err)
    } else {
        (None, None, 0.0)
    };

    let mut nodes: Vec<Node> = (0..d)
        .map(|j| Node {
            num: Polynomial::var(d, j).expect("j < d"),
            den: Polynomial::one(d),
        })
        .collect();
    let mut exact_vals: Vec<Option<ExactRational>> = vec![None; d];
    let mut gate_k = Vec::with_capacity(depth);
    for (l, layer) in net.layers().iter().enumerate() {
        let mut next = Vec::with_capacity(layer.len());
        let mut next_vals = Vec::with_capacity(layer.len());
        let mut ks = Vec::with_capacity(layer.len());
        for (g, gate_spec) in layer.iter().enumerate() {
            if constant[l][g] {
                let t = gate_spec
                    .a
                    .iter()
                    .zip(&exact_vals)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(gate_spec.b.clone(), |s, (a, v)| s + a * v.as_ref().expect("constant input"));
                let c = relu(t);
                next.push(Node::constant(d, c.clone()));
                next_vals.push(Some(c));
                ks.push(0);
            } else {
                let input = affine_combination(gate_spec, &nodes, d);
                next.push(apply_univariate(gate.as_ref().expect("gate approximant"), &input));
                next_vals.push(None);
                ks.push(k.expect("gate degree"));
            }
        }
        nodes = next;
        exact_vals = next_vals;
        gate_k.push(ks);
    }
    let out = affine_combination(net.readout(), &nodes, d);
    let mut approx = NetworkApproximation {
        network: net.clone(),
        rational: MultivariateRational {
            numerator: out.num,
            denominator: out.den,
        },
        epsilon: epsilon.clone(),
        gate_budget: budget,
        interval_radius: radius,
        k,
        gate_k,
        gate_sup_error: gate_err,
        grid_points: opts.grid_points,
        measured_sup_error: 0.0,
        gate,
        constant,
    };
    approx.measured_sup_error = measure_sup_error(&approx, opts.grid_points)?;
    Ok(approx)
}

/// Verification samples in `[-1, 1]^d`: an equispaced grid for `d = 1`, Halton
/// points plus the box corners otherwise.
pub fn verification_points(d: usize, count: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        let last = count.max(2) - 1;
        return (0..=last)
            .map(|j| vec![-1.0 + 2.0 * j as f64 / last as f64])
            .collect();
    }
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let mut pts: Vec<Vec<f64>> = (1..=count as u64)
        .map(|i| {
            (0..d)
                .map(|j| 2.0 * radical_inverse(i, PRIMES[j % PRIMES.len()]) - 1.0)
                .collect()
        })
        .collect();
    if d <= 12 {
        for mask in 0..(1usize << d) {
            pts.push((0..d).map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
    }
    pts
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn measure_sup_error(approx: &NetworkApproximation, points: usize) -> Result<f64> {
    let pts = verification_points(approx.network.input_dim(), points);
    pts.par_iter()
        .map(|z| {
            let v = approx.eval_structural_f64(z)?;
            Ok((v - approx.network.eval_f64(z)).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
