//! Normalized ReLU networks and their rational approximation.

mod approx;
mod network;
mod newman;
mod theorem2;

pub use approx::{
    approximate_network, choose_gate_degree, verification_points, ApproximationOptions,
    ApproximationReport, MultivariateRational, NetworkApproximation,
};
pub use network::{relu, Gate, ReluNetwork};
pub use newman::{
    newman_abs, newman_xi, primitive_fraction, rational_relu, scaled_rational_relu,
    UnivariateRational, XI_RELATIVE_BITS,
};
pub use theorem2::{bound_quantity, theorem2_report, Theorem2Options, Theorem2Report};
