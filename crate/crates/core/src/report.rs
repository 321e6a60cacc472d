//! Command implementations behind the `attnrat` binary. Each takes input text
//! and returns the text to emit plus an exit status, so the binary only does
//! argument parsing and file I/O.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::attention::{LayerSpec, PostProcessing};
use crate::compiler::{
    compile_layer, verify_equivalence, CompileOptions, CubeRationalFunction, NonvanishingCertificate,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::parity::{
    average_sensitivity, best_margin, falsification_campaign, parity, parity_correlation,
    theorem1_report, BooleanTable, CampaignConfig, RealTable,
};
use crate::poly::bits_of;
use crate::rational::{format_rational, int, parse_rational, to_f64, ExactRational};
use crate::relu::{
    approximate_network, bound_quantity, theorem2_report, ApproximationOptions, ReluNetwork,
    Theorem2Options,
};
use crate::sampling::{random_network, trial_rng};

pub const TOOL: &str = "attnrat";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    pub cap: usize,
    pub seed: u64,
    pub trials: u64,
    pub grid: usize,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            cap: crate::compiler::DEFAULT_EXHAUSTIVE_CAP,
            seed: 0,
            trials: 10_000,
            grid: 100_000,
        }
    }
}

impl Context {
    fn validate(&self) -> Result<()> {
        if self.cap == 0 || self.grid < 2 {
            return Err(Error::InvalidParameter("cap must be positive and grid at least 2".into()));
        }
        Ok(())
    }

    fn run(&self, command: &str) -> RunInfo {
        RunInfo {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            seed: self.seed,
            cap: self.cap,
            grid: self.grid,
            trials: self.trials,
        }
    }

    fn compile_options(&self, assume_nonvanishing: bool) -> CompileOptions {
        CompileOptions {
            cap: self.cap,
            assume_nonvanishing,
        }
    }

    fn approximation_options(&self, k_cap: usize) -> ApproximationOptions {
        ApproximationOptions {
            grid_points: self.grid,
            k_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub cap: usize,
    pub grid: usize,
    pub trials: u64,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    run: RunInfo,
    #[serde(flatten)]
    report: T,
}

/// Text to emit and the process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, status: 0 }
    }
}

fn render<T: Serialize>(ctx: &Context, command: &str, report: T) -> String {
    let env = Envelope {
        run: ctx.run(command),
        report,
    };
    serde_json::to_string_pretty(&env).expect("serializable report") + "\n"
}

fn check_cap(n: usize, ctx: &Context) -> Result<()> {
    if n > ctx.cap {
        return Err(Error::CapExceeded { n, cap: ctx.cap });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CompileOutput {
    degree_bound: usize,
    declared_p: usize,
    heads: usize,
    achieved_num_degree: usize,
    achieved_den_degree: usize,
    certificate: NonvanishingCertificate,
    function: CubeRationalFunction,
}

/// `compile`: lowers a layer with rational post-processing.
pub fn compile_command(spec: &str, ctx: &Context, assume_nonvanishing: bool) -> Result<Outcome> {
    ctx.validate()?;
    let layer = LayerSpec::from_json(spec)?;
    let compiled = compile_layer(&layer, &ctx.compile_options(assume_nonvanishing))?;
    let out = CompileOutput {
        degree_bound: compiled.degree_bound(),
        declared_p: compiled.declared_p,
        heads: compiled.heads,
        achieved_num_degree: compiled.function.num_degree(),
        achieved_den_degree: compiled.function.den_degree(),
        certificate: compiled.certificate,
        function: compiled.function,
    };
    Ok(Outcome::ok(render(ctx, "compile", out)))
}

/// `verify`: exhaustive comparison of a layer against its compiled form (freshly
/// compiled, or read from `compiled`). A mismatch exits with status 1.
pub fn verify_command(spec: &str, compiled: Option<&str>, ctx: &Context) -> Result<Outcome> {
    ctx.validate()?;
    let layer = LayerSpec::from_json(spec)?;
    check_cap(layer.n(), ctx)?;
    let function = match compiled {
        Some(text) => match serde_json::from_str::<CompileOutput>(text) {
            Ok(out) => out.function,
            Err(_) => serde_json::from_str::<CubeRationalFunction>(text)?,
        },
        None => compile_layer(&layer, &ctx.compile_options(false))?.function,
    };
    let report = verify_equivalence(&layer, &function, ctx.cap)?;
    let status = if report.success() { 0 } else { 1 };
    Ok(Outcome {
        text: render(ctx, "verify", report),
        status,
    })
}

/// `parity-check` on one layer.
pub fn parity_check_command(spec: &str, ctx: &Context) -> Result<Outcome> {
    ctx.validate()?;
    let layer = LayerSpec::from_json(spec)?;
    let report = theorem1_report(&layer, ctx.cap)?;
    Ok(Outcome::ok(render(ctx, "parity-check", report)))
}

/// `parity-check --campaign`: randomized search among layers with `2hp < n/2`.
pub fn campaign_command(n: usize, max_d: usize, ctx: &Context) -> Result<Outcome> {
    ctx.validate()?;
    check_cap(n, ctx)?;
    let report = falsification_campaign(&CampaignConfig {
        n,
        trials: ctx.trials,
        seed: ctx.seed,
        max_d,
    })?;
    Ok(Outcome::ok(render(ctx, "parity-check --campaign", report)))
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SensitivityReport {
    pub n: usize,
    pub function: String,
    pub avg_sensitivity: String,
    pub parity_correlation: String,
    pub avg_sensitivity_decimal: f64,
    pub parity_correlation_decimal: f64,
    pub note: String,
}

pub fn sensitivity_of(g: &BooleanTable, function: String) -> SensitivityReport {
    let s = average_sensitivity(g);
    let c = parity_correlation(g);
    SensitivityReport {
        n: g.n(),
        function,
        avg_sensitivity_decimal: to_f64(&s),
        parity_correlation_decimal: to_f64(&c),
        avg_sensitivity: format_rational(&s),
        parity_correlation: format_rational(&c),
        note: "exact values; the asymptotic bounds on these quantities carry unspecified constants and are not asserted".into(),
    }
}

/// Values of a layer on the whole cube.
pub fn layer_table(layer: &LayerSpec) -> Result<RealTable> {
    let n = layer.n();
    let values = (0..1usize << n)
        .map(|i| layer.eval(&bits_of(n, i)))
        .collect::<Result<Vec<_>>>()?;
    RealTable::new(n, values)
}

/// `sensitivity`: for `[T(x) > tau]` of a layer, or for parity itself.
pub fn sensitivity_command(
    spec: Option<&str>,
    parity_n: Option<usize>,
    tau: Option<&str>,
    ctx: &Context,
) -> Result<Outcome> {
    ctx.validate()?;
    let report = match (spec, parity_n) {
        (None, Some(n)) => {
            check_cap(n, ctx)?;
            sensitivity_of(&parity(n), format!("parity({n})"))
        }
        (Some(text), None) => {
            let layer = LayerSpec::from_json(text)?;
            check_cap(layer.n(), ctx)?;
            let tau = match (tau, layer.post()) {
                (Some(t), _) => parse_rational(t)?,
                (None, PostProcessing::Relu(r)) => r.threshold.clone(),
                (None, PostProcessing::Rational(_)) => int(0),
            };
            let g = layer_table(&layer)?.above(&tau);
            sensitivity_of(&g, format!("sign(T - {})", format_rational(&tau)))
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of a spec file or --parity n".into(),
            ))
        }
    };
    Ok(Outcome::ok(render(ctx, "sensitivity", report)))
}

/// `approx-relu`: a grid-certified rational approximation of a network.
pub fn approx_relu_command(net: &str, epsilon: &str, k_cap: usize, ctx: &Context) -> Result<Outcome> {
    ctx.validate()?;
    let net = ReluNetwork::from_json(net)?;
    let eps = parse_rational(epsilon)?;
    let approx = approximate_network(&net, &eps, &ctx.approximation_options(k_cap))?;
    let status = if approx.within_epsilon() { 0 } else { 5 };
    Ok(Outcome {
        text: render(ctx, "approx-relu", approx.report()),
        status,
    })
}

/// `theorem2`: margin pipeline with `(tau, gamma)` given, or measured by
/// [`best_margin`] when `gamma` is omitted.
pub fn theorem2_command(
    spec: &str,
    tau: Option<&str>,
    gamma: Option<&str>,
    k_cap: usize,
    ctx: &Context,
) -> Result<Outcome> {
    ctx.validate()?;
    let layer = LayerSpec::from_json(spec)?;
    check_cap(layer.n(), ctx)?;
    let threshold = match layer.post() {
        PostProcessing::Relu(r) => r.threshold.clone(),
        PostProcessing::Rational(_) => {
            return Err(Error::InvalidSpec("theorem2 needs ReLU post-processing".into()))
        }
    };
    let (tau, gamma) = match gamma {
        Some(g) => (
            tau.map(parse_rational).transpose()?.unwrap_or(threshold),
            parse_rational(g)?,
        ),
        None => {
            if crate::attention::head_sums_in_unit_box(&layer)?.is_some() {
                // let the pipeline report the range violation
                (threshold, ExactRational::one())
            } else {
                best_margin(&layer_table(&layer)?, &parity(layer.n()))?.ok_or_else(|| {
                    Error::InvalidParameter("layer values do not separate parity; pass --gamma".into())
                })?
            }
        }
    };
    let opts = Theorem2Options {
        compile: ctx.compile_options(false),
        approximation: ctx.approximation_options(k_cap),
    };
    let report = theorem2_report(&layer, &tau, &gamma, &opts)?;
    Ok(Outcome::ok(render(ctx, "theorem2", report)))
}

/// One row request of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepEntry {
    /// `sawtooth` (ReLU-hat fixture, `m = n`, `l = 1`) or `random` (best of
    /// `samples` random networks of width `m` and depth `ell`).
    pub family: String,
    pub n: usize,
    #[serde(default = "one")]
    pub h: usize,
    pub m: Option<usize>,
    pub ell: Option<usize>,
    pub samples: Option<u64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub configurations: Vec<SweepEntry>,
}

#[derive(Serialize)]
struct SweepRow {
    family: String,
    n: usize,
    h: usize,
    m: usize,
    ell: usize,
    samples: u64,
    tau: String,
    gamma: String,
    gamma_decimal: String,
    bound_quantity: String,
    n_over_4: String,
    bound_quantity_ge_n_over_4: String,
}

fn sweep_row(index: usize, entry: &SweepEntry, ctx: &Context) -> Result<SweepRow> {
    let n = entry.n;
    if n == 0 || entry.h == 0 {
        return Err(Error::InvalidParameter(format!("row {}: n and h must be positive", index + 1)));
    }
    check_cap(n, ctx)?;
    let g = parity(n);
    let hh = entry.h as i64;
    let heads = vec![crate::attention::scaled_mean_head(n, crate::rational::ratio(-1, hh), crate::rational::ratio(2, hh)); entry.h];
    let (m, ell, samples, best) = match entry.family.as_str() {
        "sawtooth" => {
            let layer = fixtures::sawtooth_layer(n, entry.h)?;
            (n, 1, 1, best_margin(&layer_table(&layer)?, &g)?)
        }
        "random" => {
            let (Some(m), Some(ell)) = (entry.m, entry.ell) else {
                return Err(Error::InvalidParameter(format!("row {}: random family needs m and ell", index + 1)));
            };
            if m == 0 {
                return Err(Error::InvalidParameter(format!("row {}: m must be positive", index + 1)));
            }
            let samples = entry.samples.unwrap_or(32);
            let mut best: Option<(ExactRational, ExactRational)> = None;
            for s in 0..samples {
                let mut rng = trial_rng(ctx.seed, ((index as u64) << 32) | s);
                let net = random_network(&mut rng, 1, m, ell);
                let layer = LayerSpec::new(
                    heads.clone(),
                    PostProcessing::Relu(crate::attention::ReluPost {
                        network: net,
                        threshold: int(0),
                    }),
                )?;
                if let Some(found) = best_margin(&layer_table(&layer)?, &g)? {
                    if best.as_ref().is_none_or(|b| found.1 > b.1) {
                        best = Some(found);
                    }
                }
            }
            (m, ell, samples, best)
        }
        other => {
            return Err(Error::InvalidParameter(format!("row {}: unknown family {other:?}", index + 1)))
        }
    };
    let quarter = crate::parity::quarter(n);
    let mut row = SweepRow {
        family: entry.family.clone(),
        n,
        h: entry.h,
        m,
        ell,
        samples,
        tau: String::new(),
        gamma: String::new(),
        gamma_decimal: String::new(),
        bound_quantity: String::new(),
        n_over_4: format_rational(&quarter),
        bound_quantity_ge_n_over_4: String::new(),
    };
    if let Some((tau, gamma)) = best.filter(|(_, g)| g.is_positive()) {
        let q = bound_quantity(entry.h, m, ell, &gamma);
        row.tau = format_rational(&tau);
        row.gamma = format_rational(&gamma);
        row.gamma_decimal = format!("{:.6e}", to_f64(&gamma));
        row.bound_quantity = format!("{q:.6e}");
        row.bound_quantity_ge_n_over_4 = (q >= to_f64(&quarter)).to_string();
    }
    Ok(row)
}

/// `sweep`: one CSV row per configuration; byte-identical for a fixed seed.
pub fn sweep_command(config: &str, ctx: &Context) -> Result<Outcome> {
    ctx.validate()?;
    let cfg: SweepConfig = serde_json::from_str(config)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    writer
        .write_record([
            "family", "n", "h", "m", "ell", "samples", "tau", "gamma", "gamma_decimal",
            "bound_quantity", "n_over_4", "bound_quantity_ge_n_over_4",
        ])
        .map_err(csv_err)?;
    for (i, entry) in cfg.configurations.iter().enumerate() {
        writer.serialize(sweep_row(i, entry, ctx)?).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(Outcome::ok(String::from_utf8(bytes).expect("csv output is utf-8")))
}

/// Fixture names accepted by [`make_fixture_command`].
pub const FIXTURE_KINDS: &[&str] = &[
    "parity", "sawtooth", "identity", "reciprocal", "constant", "out-of-range", "single-gate",
    "fold-net", "zero-net", "sawtooth-net",
];

/// `make-fixture`: JSON for a built-in layer or network.
pub fn make_fixture_command(kind: &str, n: usize, h: usize) -> Result<Outcome> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let text = match kind {
        "parity" => fixtures::parity_layer(n)?.to_json(),
        "sawtooth" => fixtures::sawtooth_layer(n, h)?.to_json(),
        "identity" => fixtures::identity_layer(n).to_json(),
        "reciprocal" => fixtures::reciprocal_layer(n).to_json(),
        "constant" => fixtures::constant_layer(n, int(1)).to_json(),
        "out-of-range" => fixtures::out_of_range_layer(n).to_json(),
        "single-gate" => fixtures::single_gate_network().to_json(),
        "fold-net" => fixtures::fold_network().to_json(),
        "zero-net" => fixtures::zero_weight_network().to_json(),
        "sawtooth-net" => fixtures::sawtooth_network(n)?.to_json(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown fixture {other:?}; expected one of {}",
                FIXTURE_KINDS.join(", ")
            )))
        }
    };
    Ok(Outcome::ok(text + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::default()
    }

    #[test]
    fn compile_uniform_mean() {
        let spec = fixtures::identity_layer(2).to_json();
        let out = compile_command(&spec, &ctx(), false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert!(v["achievedNumDegree"].as_u64().unwrap() <= 2);
        assert_eq!(v["run"]["tool"], "attnrat");
    }

    #[test]
    fn reciprocal_exit_three() {
        let spec = fixtures::reciprocal_layer(2).to_json();
        assert_eq!(compile_command(&spec, &ctx(), false).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn sensitivity_examples() {
        let out = sensitivity_command(None, Some(5), None, &ctx()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["avgSensitivity"], "5/1");
        assert_eq!(v["parityCorrelation"], "1/1");
        let spec = fixtures::constant_layer(3, int(1)).to_json();
        let out = sensitivity_command(Some(&spec), None, None, &ctx()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["avgSensitivity"], "0/1");
    }

    #[test]
    fn sweep_rows_and_determinism() {
        let config = r#"{"configurations": [
            {"family": "sawtooth", "n": 2},
            {"family": "sawtooth", "n": 4},
            {"family": "sawtooth", "n": 6}]}"#;
        let a = sweep_command(config, &ctx()).unwrap().text;
        let b = sweep_command(config, &ctx()).unwrap().text;
        assert_eq!(a, b);
        let mut reader = csv::Reader::from_reader(a.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        for row in rows {
            let q: f64 = row[9].parse().unwrap();
            assert!(q.is_finite() && q > 0.0);
        }
        let empty = sweep_command(r#"{"configurations": []}"#, &ctx()).unwrap().text;
        assert_eq!(empty.lines().count(), 1);
    }

    #[test]
    fn unknown_fixture() {
        assert_eq!(make_fixture_command("nope", 2, 1).unwrap_err().exit_code(), 2);
        for kind in FIXTURE_KINDS {
            assert!(make_fixture_command(kind, 3, 1).is_ok(), "{kind}");
        }
    }
}
