//! Margin pipeline for layers with ReLU post-processing: approximate the
//! network with `eps = gamma / 2`, check that the approximant still
//! sign-represents parity, compile it and compare `hp` with `n/4`.

use num_traits::Signed;
use serde::Serialize;

use super::approx::{approximate_network, ApproximationOptions, ApproximationReport};
use crate::attention::{head_sums_in_unit_box, LayerSpec, PostProcessing, RationalPost, ReluPost};
use crate::compiler::{compile_layer, verify_equivalence, CompileOptions, EquivalenceReport};
use crate::error::{Error, Result};
use crate::parity::{bound_report, margin_represents, parity, signs_represent_parity, BoundReport, RealTable};
use crate::poly::{bits_of, bitstring};
use crate::rational::{format_rational, int, to_f64, ExactRational};

#[derive(Clone, Copy, Debug, Default)]
pub struct Theorem2Options {
    pub compile: CompileOptions,
    pub approximation: ApproximationOptions,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem2Report {
    #[serde(flatten)]
    pub bound: BoundReport,
    /// Width and depth of the post-processing network.
    pub m: usize,
    pub ell: usize,
    pub tau: String,
    pub gamma: String,
    pub hypothesis_met: bool,
    pub epsilon: Option<String>,
    /// `v(Y(x)) - tau` sign-represents parity, checked exactly on the cube.
    pub approximant_sign_represents: Option<bool>,
    /// `v(Y(x)) - tau >= gamma/2` on parity-1 inputs and `<= -gamma/2` otherwise.
    pub proof_margins_hold: Option<bool>,
    pub approximation: Option<ApproximationReport>,
    pub equivalence: Option<EquivalenceReport>,
    /// `h m^l ln(2l/gamma)^{2l}` in floating point, to be set against `n / C`.
    pub bound_quantity_decimal: f64,
    pub constant: String,
}

/// `h m^l ln(2l/gamma)^{2l}`; the logarithmic factor is 1 when `l = 0`.
pub fn bound_quantity(h: usize, m: usize, ell: usize, gamma: &ExactRational) -> f64 {
    let base = h as f64 * (m as f64).powi(ell as i32);
    if ell == 0 {
        return base;
    }
    let ln = (2.0 * ell as f64 / to_f64(gamma)).ln();
    base * ln.powi(2 * ell as i32)
}

/// Runs the pipeline on a layer whose post-processing is a ReLU network.
pub fn theorem2_report(
    layer: &LayerSpec,
    tau: &ExactRational,
    gamma: &ExactRational,
    opts: &Theorem2Options,
) -> Result<Theorem2Report> {
    let PostProcessing::Relu(ReluPost { network, .. }) = layer.post() else {
        return Err(Error::InvalidSpec("theorem2 needs ReLU post-processing".into()));
    };
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter("margin gamma must be positive".into()));
    }
    let n = layer.n();
    let cap = opts.compile.cap;
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if let Some(x) = head_sums_in_unit_box(layer)? {
        return Err(Error::RangeAssumptionViolated { point: bitstring(&x) });
    }
    let h = layer.h();
    let (m, ell) = (network.width(), network.depth());
    let g = parity(n);
    let points: Vec<Vec<bool>> = (0..1usize << n).map(|i| bits_of(n, i)).collect();
    let values = points.iter().map(|x| layer.eval(x)).collect::<Result<Vec<_>>>()?;
    let hypothesis = margin_represents(&RealTable::new(n, values)?, &g, tau, gamma)?;

    let mut report = Theorem2Report {
        bound: bound_report("2", n, h, 0, false, String::new()),
        m,
        ell,
        tau: format_rational(tau),
        gamma: format_rational(gamma),
        hypothesis_met: hypothesis,
        epsilon: None,
        approximant_sign_represents: None,
        proof_margins_hold: None,
        approximation: None,
        equivalence: None,
        bound_quantity_decimal: bound_quantity(h, m, ell, gamma),
        constant: "C (universal, not estimated)".into(),
    };
    if !hypothesis {
        report.bound.witness = format!(
            "hypothesis unmet: the layer does not ({}, {})-represent parity; no bound asserted",
            report.tau, report.gamma
        );
        return Ok(report);
    }

    let epsilon = gamma / int(2);
    let approx = approximate_network(network, &epsilon, &opts.approximation)?;
    let v = &approx.rational;
    let mut represents = true;
    let mut margins = true;
    for (idx, x) in points.iter().enumerate() {
        let shifted = v.eval(&layer.sum_eval(x)?)? - tau;
        let one = g.get(idx);
        represents &= shifted.is_positive() == one;
        margins &= if one { shifted >= epsilon } else { shifted <= -epsilon.clone() };
    }

    // v - tau = (N - tau D) / D, declared degree p = deg v
    let p = approx.degree();
    let post = RationalPost {
        numerator: &v.numerator - &v.denominator.scale(tau),
        denominator: v.denominator.clone(),
        degree_bound: p,
    };
    let rational_layer = LayerSpec::new(layer.heads().to_vec(), PostProcessing::Rational(post))?;
    let compiled = compile_layer(&rational_layer, &opts.compile)?;
    let equivalence = verify_equivalence(&rational_layer, &compiled.function, cap)?;
    let compiled_represents = signs_represent_parity(&compiled.function.cube_signs()?);

    let witness = match (compiled_represents, h * p * 4 >= n) {
        (false, _) => "compiled approximant does not sign-represent parity".to_string(),
        (true, true) => format!("compiled approximant sign-represents parity with hp = {} >= n/4", h * p),
        (true, false) => format!("CONTRADICTION: compiled approximant sign-represents parity with hp = {} < n/4", h * p),
    };
    report.bound = bound_report("2", n, h, p, compiled_represents, witness);
    report.epsilon = Some(format_rational(&epsilon));
    report.approximant_sign_represents = Some(represents);
    report.proof_margins_hold = Some(margins);
    report.approximation = Some(approx.report());
    report.equivalence = Some(equivalence);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{out_of_range_layer, sawtooth_layer, sawtooth_margin};
    use crate::rational::ratio;

    #[test]
    fn sawtooth_n2_end_to_end() {
        let layer = sawtooth_layer(2, 1).unwrap();
        let gamma = sawtooth_margin(2);
        let r = theorem2_report(&layer, &int(0), &gamma, &Theorem2Options::default()).unwrap();
        assert!(r.hypothesis_met);
        assert_eq!(r.approximant_sign_represents, Some(true));
        assert_eq!(r.proof_margins_hold, Some(true));
        assert!(r.bound.sign_represents && r.bound.satisfied && !r.bound.contradiction);
        assert!(r.equivalence.as_ref().unwrap().success());
        assert!(r.bound_quantity_decimal.is_finite() && r.bound_quantity_decimal > 0.0);
    }

    #[test]
    fn range_violation() {
        let err = theorem2_report(&out_of_range_layer(2), &int(0), &ratio(1, 4), &Theorem2Options::default())
            .unwrap_err();
        assert!(matches!(err, Error::RangeAssumptionViolated { .. }));
    }

    #[test]
    fn hypothesis_unmet() {
        let layer = sawtooth_layer(2, 1).unwrap();
        let r = theorem2_report(&layer, &int(0), &ratio(1, 2), &Theorem2Options::default()).unwrap();
        assert!(!r.hypothesis_met);
        assert!(r.bound.witness.contains("hypothesis unmet"));
        assert!(r.approximation.is_none());
    }
}
