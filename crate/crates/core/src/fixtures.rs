//! Ready-made layers and networks used by the examples, tests and the CLI.

use num_traits::One;

use crate::attention::{
    scaled_mean_head, uniform_mean_head, LayerSpec, PostProcessing, RationalPost, ReluPost,
};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{int, ratio, ExactRational};
use crate::relu::{Gate, ReluNetwork};

pub use crate::parity::build_parity_layer as parity_layer;

/// `t -> relu(t)`: one hidden gate `a = (1), b = 0` read out unchanged.
pub fn single_gate_network() -> ReluNetwork {
    ReluNetwork::new(
        1,
        vec![vec![Gate::new(vec![int(1)], int(0))]],
        Gate::new(vec![int(1)], int(0)),
    )
    .expect("normalized")
}

/// Width 2, depth 2, computing `3|t|/32 - 1/16`.
pub fn fold_network() -> ReluNetwork {
    let half = ratio(1, 2);
    let w = ratio(3, 8);
    let b = ratio(1, 8);
    ReluNetwork::new(
        1,
        vec![
            vec![
                Gate::new(vec![half.clone()], int(0)),
                Gate::new(vec![-half.clone()], int(0)),
            ],
            vec![
                Gate::new(vec![w.clone(), w.clone()], -b.clone()),
                Gate::new(vec![-w.clone(), -w], b),
            ],
        ],
        Gate::new(vec![half.clone(), -half], int(0)),
    )
    .expect("normalized")
}

/// Gates with all-zero weights: every gate is the constant `relu(b)`.
pub fn zero_weight_network() -> ReluNetwork {
    ReluNetwork::new(
        2,
        vec![
            vec![
                Gate::new(vec![int(0), int(0)], ratio(1, 2)),
                Gate::new(vec![int(0), int(0)], ratio(-1, 3)),
            ],
            vec![Gate::new(vec![ratio(1, 2), ratio(1, 2)], int(0))],
        ],
        Gate::new(vec![int(1)], int(0)),
    )
    .expect("normalized")
}

/// Width-`n`, depth-1 ReLU-hat network of one input `y`. On the nodes
/// `y_k = 2k/n - 1` it takes the values `(-1)^{k+1} / Z` with
/// `Z = 1 + 2n + 4n(n - 1)`; between nodes it is piecewise linear.
pub fn sawtooth_network(n: usize) -> Result<ReluNetwork> {
    if n == 0 {
        return Err(Error::InvalidParameter("sawtooth needs n >= 1".into()));
    }
    let nn = n as i64;
    let z = 1 + 2 * nn + 4 * nn * (nn - 1);
    // g_j = relu((y - y_j) / 2)
    let gates = (0..nn)
        .map(|j| Gate::new(vec![ratio(1, 2)], -(ratio(2 * j, nn) - int(1)) / int(2)))
        .collect();
    let readout_a = (0..nn)
        .map(|j| match j {
            0 => ratio(2 * nn, z),
            _ if j % 2 == 1 => ratio(-4 * nn, z),
            _ => ratio(4 * nn, z),
        })
        .collect();
    ReluNetwork::new(1, vec![gates], Gate::new(readout_a, ratio(-1, z)))
}

/// `h` uniform heads whose sum is `y = 2|x|/n - 1`, post-processed by
/// [`sawtooth_network`] with threshold 0. Sign-represents parity with margin
/// `1 / Z`.
pub fn sawtooth_layer(n: usize, h: usize) -> Result<LayerSpec> {
    if h == 0 {
        return Err(Error::InvalidParameter("need at least one head".into()));
    }
    let hh = h as i64;
    let head = scaled_mean_head(n, ratio(-1, hh), ratio(2, hh));
    LayerSpec::new(
        vec![head; h],
        PostProcessing::Relu(ReluPost {
            network: sawtooth_network(n)?,
            threshold: int(0),
        }),
    )
}

/// Margin `1 / (1 + 2n + 4n(n - 1))` of [`sawtooth_layer`].
pub fn sawtooth_margin(n: usize) -> ExactRational {
    let nn = n as i64;
    ratio(1, 1 + 2 * nn + 4 * nn * (nn - 1))
}

fn rational_layer(n: usize, numerator: Polynomial, denominator: Polynomial, p: usize) -> LayerSpec {
    LayerSpec::new(
        vec![uniform_mean_head(n)],
        PostProcessing::Rational(RationalPost {
            numerator,
            denominator,
            degree_bound: p,
        }),
    )
    .expect("well-formed fixture")
}

/// Uniform-mean head with `u(z) = z`.
pub fn identity_layer(n: usize) -> LayerSpec {
    rational_layer(n, Polynomial::var(1, 0).expect("arity 1"), Polynomial::one(1), 1)
}

/// Uniform-mean head with `u(z) = 1 / z`; undefined at the all-zero input.
pub fn reciprocal_layer(n: usize) -> LayerSpec {
    rational_layer(n, Polynomial::one(1), Polynomial::var(1, 0).expect("arity 1"), 1)
}

/// Uniform-mean head with a constant post, `u = c`.
pub fn constant_layer(n: usize, c: ExactRational) -> LayerSpec {
    rational_layer(n, Polynomial::constant(1, c), Polynomial::one(1), 0)
}

/// Two heads each reaching `3/4` at the all-ones input, so the head sum leaves `[-1, 1]`.
pub fn out_of_range_layer(n: usize) -> LayerSpec {
    let head = scaled_mean_head(n, int(0), ratio(3, 4));
    LayerSpec::new(
        vec![head.clone(), head],
        PostProcessing::Relu(ReluPost {
            network: single_gate_network(),
            threshold: ExactRational::one() / int(2),
        }),
    )
    .expect("well-formed fixture")
}
