//! Seeded random heads, polynomials and layers for tests and falsification runs.
//!
//! Weights are `2^e` with `e` uniform in `[-8, 8]`; value coordinates and
//! polynomial coefficients are small integers.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attention::{HeadSpec, LayerSpec, PostProcessing, RationalPost, WeightTable};
use crate::error::Result;
use crate::poly::{bits_of, Monomial, Polynomial};
use crate::rational::{int, ExactRational};
use crate::relu::{Gate, ReluNetwork};

/// Generator for trial `stream` of a run seeded by `seed`: independent of how
/// trials are scheduled.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn power_of_two(e: i32) -> ExactRational {
    if e >= 0 {
        int(1i64 << e)
    } else {
        ExactRational::new(1.into(), (1i64 << -e).into())
    }
}

pub fn random_weight<R: Rng>(rng: &mut R) -> ExactRational {
    power_of_two(rng.random_range(-8..=8))
}

pub fn random_head<R: Rng>(rng: &mut R, n: usize, d: usize) -> HeadSpec {
    let weights: Vec<WeightTable> = (0..n)
        .map(|_| {
            [
                [random_weight(rng), random_weight(rng)],
                [random_weight(rng), random_weight(rng)],
            ]
        })
        .collect();
    let coords = |rng: &mut R| -> Vec<ExactRational> { (0..d).map(|_| int(rng.random_range(-3..=3))).collect() };
    let values = (0..n).map(|_| [coords(rng), coords(rng)]).collect();
    HeadSpec::new(n, d, weights, values).expect("positive weights, consistent dimensions")
}

/// Every exponent vector over `d` variables with total degree `<= p`.
pub fn monomials_up_to(d: usize, p: usize) -> Vec<Monomial> {
    fn rec(var: usize, d: usize, left: usize, acc: &mut Vec<(usize, u32)>, out: &mut Vec<Monomial>) {
        if var == d {
            out.push(Monomial::from_exponents(acc.iter().copied()));
            return;
        }
        for e in 0..=left {
            acc.push((var, e as u32));
            rec(var + 1, d, left - e, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, p, &mut Vec::new(), &mut out);
    out
}

/// Each monomial of degree `<= p` is kept with probability 1/2 and given a
/// nonzero coefficient in `[-3, 3]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, d: usize, p: usize) -> Polynomial {
    let terms: Vec<(Monomial, ExactRational)> = monomials_up_to(d, p)
        .into_iter()
        .filter_map(|m| {
            if !rng.random_bool(0.5) {
                return None;
            }
            let c = rng.random_range(1..=3) * if rng.random_bool(0.5) { 1 } else { -1 };
            Some((m, int(c)))
        })
        .collect();
    Polynomial::from_terms(d, terms).expect("monomials within arity")
}

/// `h` random heads with a random `P / Q` post of declared degree `p`. `Q` is
/// never the zero polynomial but may vanish at some head sum.
pub fn random_rational_layer<R: Rng>(rng: &mut R, n: usize, d: usize, h: usize, p: usize) -> LayerSpec {
    let heads = (0..h).map(|_| random_head(rng, n, d)).collect();
    let numerator = random_polynomial(rng, d, p);
    let mut denominator = random_polynomial(rng, d, p);
    if denominator.is_zero() {
        denominator = Polynomial::one(d);
    }
    LayerSpec::new(
        heads,
        PostProcessing::Rational(RationalPost {
            numerator,
            denominator,
            degree_bound: p,
        }),
    )
    .expect("random layer is well formed")
}

/// Gate with integer weights in `[-3, 3]` scaled to `||a||_1 + |b| = 1` (or all zero).
pub fn random_gate<R: Rng>(rng: &mut R, width: usize) -> Gate {
    let raw: Vec<i64> = (0..=width).map(|_| rng.random_range(-3..=3)).collect();
    let norm: i64 = raw.iter().map(|v| v.abs()).sum();
    let scale = |v: i64| if norm == 0 { int(0) } else { ExactRational::new(v.into(), norm.into()) };
    Gate::new(raw[..width].iter().map(|&v| scale(v)).collect(), scale(raw[width]))
}

/// Normalized network with `depth` hidden layers of `width` gates.
pub fn random_network<R: Rng>(rng: &mut R, input_dim: usize, width: usize, depth: usize) -> ReluNetwork {
    let mut layers = Vec::with_capacity(depth);
    let mut prev = input_dim;
    for _ in 0..depth {
        layers.push((0..width).map(|_| random_gate(rng, prev)).collect());
        prev = width;
    }
    let readout = random_gate(rng, prev);
    ReluNetwork::new(input_dim, layers, readout).expect("normalized by construction")
}

/// Whether the reference evaluator is defined on every cube point.
pub fn defined_on_cube(layer: &LayerSpec) -> Result<bool> {
    let n = layer.n();
    for idx in 0..1usize << n {
        match layer.eval(&bits_of(n, idx)) {
            Ok(_) => {}
            Err(crate::Error::DenominatorVanished { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Draws layers until one is defined on the whole cube; returns it with the
/// number of rejected draws.
pub fn random_valid_layer<R: Rng>(rng: &mut R, n: usize, d: usize, h: usize, p: usize) -> Result<(LayerSpec, u64)> {
    let mut rejected = 0;
    loop {
        let layer = random_rational_layer(rng, n, d, h, p);
        if defined_on_cube(&layer)? {
            return Ok((layer, rejected));
        }
        rejected += 1;
    }
}
