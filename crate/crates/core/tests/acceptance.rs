//! Acceptance suite. Each criterion runs in isolation and prints one line:
//! `PASS` or `FAIL`, its number and a short summary. The process exits with a
//! failure status when any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use attnrat::attention::{HeadSpec, LayerSpec, PostProcessing};
use attnrat::compiler::{compile_layer, head_to_rational, indicator_poly, CompileOptions};
use attnrat::fixtures::{
    fold_network, parity_layer, sawtooth_layer, sawtooth_network, single_gate_network,
    zero_weight_network,
};
use attnrat::parity::{
    average_sensitivity, best_margin, falsification_campaign, majority, parity, parity_correlation,
    ptf_parity_feasible, theorem1_report, CampaignConfig,
};
use attnrat::poly::bits_of;
use attnrat::rational::{int, ratio, to_f64};
use attnrat::relu::{
    approximate_network, newman_abs, theorem2_report, ApproximationOptions, ReluNetwork,
    Theorem2Options,
};
use attnrat::report::{layer_table, sweep_command, Context};
use attnrat::sampling::{random_valid_layer, trial_rng};
use attnrat::{ExactRational, Polynomial};
use num_traits::{One, Signed, Zero};
use rand::Rng;

const SEED: u64 = 20_240_601;

// ---- independent oracles -------------------------------------------------

/// Softmax-weighted average straight from the head's tables.
fn oracle_head(head: &HeadSpec, x: &[bool]) -> Vec<ExactRational> {
    let last = x[x.len() - 1];
    let mut num = vec![ExactRational::zero(); head.d()];
    let mut den = ExactRational::zero();
    for (i, &xi) in x.iter().enumerate() {
        let w = head.weight(i, last, xi);
        for (acc, v) in num.iter_mut().zip(head.value(i, xi)) {
            *acc += w * v;
        }
        den += w;
    }
    num.into_iter().map(|v| v / &den).collect()
}

fn oracle_poly(p: &Polynomial, z: &[ExactRational]) -> ExactRational {
    let mut acc = ExactRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (i, e) in m.iter() {
            for _ in 0..e {
                t *= &z[i];
            }
        }
        acc += t;
    }
    acc
}

/// `None` when the post-processing denominator vanishes.
fn oracle_layer(layer: &LayerSpec, x: &[bool]) -> Option<ExactRational> {
    let mut sum = vec![ExactRational::zero(); layer.d()];
    for head in layer.heads() {
        for (s, y) in sum.iter_mut().zip(oracle_head(head, x)) {
            *s += y;
        }
    }
    let PostProcessing::Rational(post) = layer.post() else {
        panic!("rational post expected")
    };
    let q = oracle_poly(&post.denominator, &sum);
    (!q.is_zero()).then(|| oracle_poly(&post.numerator, &sum) / q)
}

fn oracle_relu_net(net: &ReluNetwork, z: &[ExactRational]) -> ExactRational {
    let mut act = z.to_vec();
    for layer in net.layers() {
        act = layer
            .iter()
            .map(|g| {
                let t = g.a.iter().zip(&act).fold(g.b.clone(), |s, (a, v)| s + a * v);
                if t.is_negative() { ExactRational::zero() } else { t }
            })
            .collect();
    }
    let r = net.readout();
    r.a.iter().zip(&act).fold(r.b.clone(), |s, (a, v)| s + a * v)
}

fn is_odd(idx: usize) -> bool {
    idx.count_ones() % 2 == 1
}

/// Sensitivity by flipping each bit of each input.
fn enumerate_sensitivity(n: usize, f: impl Fn(usize) -> bool) -> ExactRational {
    let mut flips = 0i64;
    for x in 0..1usize << n {
        for i in 0..n {
            flips += (f(x) != f(x ^ (1 << i))) as i64;
        }
    }
    ratio(flips, 1i64 << n)
}

// ---- criteria ------------------------------------------------------------

fn compiler_exactness() -> String {
    let opts = CompileOptions::default();
    let mut points = 0u64;
    for t in 0..200u64 {
        let mut rng = trial_rng(SEED, t);
        let n = rng.random_range(1..=10);
        let d = rng.random_range(1..=3);
        let h = rng.random_range(1..=3);
        let p = rng.random_range(0..=3);
        let (layer, _) = random_valid_layer(&mut rng, n, d, h, p).unwrap();
        for head in layer.heads() {
            let lowered = head_to_rational(head);
            assert!(lowered.denominator.total_degree() <= 2, "trial {t}: head denominator degree");
            for num in &lowered.numerators {
                assert!(num.total_degree() <= 2, "trial {t}: head numerator degree");
            }
        }
        let compiled = compile_layer(&layer, &opts).unwrap();
        let f = &compiled.function;
        let bound = 2 * h * p;
        assert!(f.num_degree() <= bound && f.den_degree() <= bound, "trial {t}: layer degree above 2hp");
        for idx in 0..1usize << n {
            let x = bits_of(n, idx);
            let expect = oracle_layer(&layer, &x).expect("sampled layer is defined on the cube");
            assert_eq!(f.eval_bits(&x).unwrap(), expect, "trial {t}: mismatch at {idx}");
            points += 1;
        }
    }
    format!("200 layers, {points} points equal, degrees within 2 and 2hp")
}

fn indicator_identity() -> String {
    for a in [false, true] {
        for b in [false, true] {
            let ind = indicator_poly(a, b, 0, 1, 2).unwrap();
            for xa in [false, true] {
                for xb in [false, true] {
                    let v = ind.eval(&[int(xa as i64), int(xb as i64)]).unwrap();
                    let expect = int((xa == a && xb == b) as i64);
                    assert_eq!(v, expect, "I_{{{a},{b}}}({xa},{xb})");
                }
            }
        }
    }
    "16 evaluations match the Kronecker indicator".into()
}

fn ptf_lp() -> String {
    for n in 1..=4 {
        assert!(!ptf_parity_feasible(n, n - 1).unwrap(), "degree n-1 feasible for n={n}");
        assert!(ptf_parity_feasible(n, n).unwrap(), "degree n infeasible for n={n}");
    }
    "degree n-1 infeasible and degree n feasible for n = 1..4".into()
}

fn parity_consistency() -> String {
    for n in 1..=10 {
        let layer = parity_layer(n).unwrap();
        for idx in 0..1usize << n {
            let v = layer.eval(&bits_of(n, idx)).unwrap();
            assert_eq!(v.is_positive(), is_odd(idx), "n={n}: wrong sign at {idx}");
        }
        let r = theorem1_report(&layer, 20).unwrap();
        assert!(r.sign_represents && r.hp == n && 4 * r.hp >= n && r.satisfied, "n={n}: {r:?}");
    }
    let mut rejected = Vec::new();
    for n in [6, 8] {
        let cfg = CampaignConfig { n, trials: 10_000, seed: SEED, max_d: 3 };
        let r = falsification_campaign(&cfg).unwrap();
        assert_eq!(r.sign_representations_found, 0, "n={n}: campaign found a representation");
        assert!(r.satisfied && r.contradictions == 0);
        assert!(r.note.contains("does not prove"), "report must state it is a consistency check");
        assert!(r.shapes.iter().all(|s| 4 * s.h * s.p < n));
        rejected.push(r.rejected_layers);
    }
    format!(
        "parity layer n=1..10 ok; 10^4 trials each for n=6,8 found 0 (rejected draws {rejected:?}); consistency only"
    )
}

fn newman_pipeline() -> String {
    let errs: Vec<f64> = [4, 9, 16, 25]
        .iter()
        .map(|&k| newman_abs(k).unwrap().sup_error_on_grid(f64::abs, 100_000))
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "not strictly decreasing: {errs:?}");

    let nets = [
        ("single-gate", single_gate_network()),
        ("fold", fold_network()),
        ("sawtooth-2", sawtooth_network(2).unwrap()),
        ("sawtooth-4", sawtooth_network(4).unwrap()),
        ("zero", zero_weight_network()),
    ];
    let opts = ApproximationOptions::default();
    let mut runs = 0;
    for (name, net) in &nets {
        for eps in [ratio(1, 2), ratio(1, 10), ratio(1, 50)] {
            let a = approximate_network(net, &eps, &opts).unwrap();
            assert!(a.within_epsilon(), "{name} at {eps}: grid error {}", a.measured_sup_error);
            // exact spot check on a coarse lattice of [-1, 1]^d
            let dim = net.input_dim();
            let steps = if dim == 1 { 40 } else { 8 };
            for j in 0..(steps + 1usize).pow(dim as u32) {
                let z: Vec<ExactRational> = (0..dim)
                    .map(|c| {
                        let k = (j / (steps + 1).pow(c as u32)) % (steps + 1);
                        ratio(2 * k as i64 - steps as i64, steps as i64)
                    })
                    .collect();
                let err = (a.rational.eval(&z).unwrap() - oracle_relu_net(net, &z)).abs();
                assert!(err <= eps, "{name} at {eps}: exact error {} at {z:?}", to_f64(&err));
            }
            runs += 1;
        }
    }
    format!(
        "Newman errors {:.2e} > {:.2e} > {:.2e} > {:.2e}; {runs} network approximations within eps",
        errs[0], errs[1], errs[2], errs[3]
    )
}

fn margin_pipeline() -> String {
    let mut out = Vec::new();
    for n in [2, 4] {
        let layer = sawtooth_layer(n, 1).unwrap();
        let (tau, gamma) = best_margin(&layer_table(&layer).unwrap(), &parity(n)).unwrap().unwrap();
        assert!(gamma.is_positive());
        let r = theorem2_report(&layer, &tau, &gamma, &Theorem2Options::default()).unwrap();
        assert!(r.hypothesis_met);
        assert_eq!(r.approximant_sign_represents, Some(true), "n={n}");
        assert!(r.equivalence.as_ref().unwrap().success());
        assert!(r.bound.sign_represents && 4 * r.bound.hp >= n && r.bound.satisfied, "n={n}: {:?}", r.bound);
        out.push(format!("n={n}: gamma={gamma} p={} hp={}", r.bound.p, r.bound.hp));
    }
    out.join("; ")
}

fn sensitivity_quantities() -> String {
    for n in 1..=12 {
        let g = parity(n);
        assert_eq!(average_sensitivity(&g), int(n as i64), "n={n}");
        assert_eq!(enumerate_sensitivity(n, is_odd), int(n as i64));
        assert_eq!(parity_correlation(&g), ExactRational::one(), "n={n}");
    }
    let maj = enumerate_sensitivity(3, |x| x.count_ones() >= 2);
    assert_eq!(maj, ratio(3, 2));
    assert_eq!(average_sensitivity(&majority(3)), maj);
    "AS(parity(n)) = n and correlation 1 for n <= 12; AS(maj3) = 3/2".into()
}

fn determinism() -> String {
    let config = r#"{"configurations": [
        {"family": "sawtooth", "n": 5},
        {"family": "random", "n": 3, "m": 3, "ell": 2, "samples": 24},
        {"family": "random", "n": 2, "m": 2, "ell": 1, "samples": 24}
    ]}"#;
    let ctx = Context { seed: SEED, ..Default::default() };
    let a = sweep_command(config, &ctx).unwrap().text;
    assert_eq!(a, sweep_command(config, &ctx).unwrap().text, "sweep differs between runs");

    let cfg = CampaignConfig { n: 9, trials: 300, seed: SEED, max_d: 3 };
    let c1 = serde_json::to_string(&falsification_campaign(&cfg).unwrap()).unwrap();
    let c2 = serde_json::to_string(&falsification_campaign(&cfg).unwrap()).unwrap();
    assert_eq!(c1, c2, "campaign differs between runs");

    // through the binary, so argument handling and file output are covered too
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.json");
    std::fs::write(&config_path, config).unwrap();
    let run = |name: &str, args: &[&str]| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_attnrat"))
            .args(args)
            .arg("--seed")
            .arg(SEED.to_string())
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{args:?} exited with {status}");
        std::fs::read(out).unwrap()
    };
    let cfg_arg = config_path.to_str().unwrap();
    let s1 = run("s1.csv", &["sweep", cfg_arg]);
    let s2 = run("s2.csv", &["sweep", cfg_arg]);
    assert_eq!(s1, s2, "CLI sweep output differs");
    assert_eq!(s1, a.as_bytes(), "CLI and library sweep disagree");
    let campaign = ["parity-check", "--campaign", "--n", "9", "--trials", "300"];
    let p1 = run("p1.json", &campaign);
    let p2 = run("p2.json", &campaign);
    assert_eq!(p1, p2, "CLI campaign output differs");
    "sweep and campaigns byte-identical across runs (library and CLI)".into()
}

type Criterion = (&'static str, fn() -> String);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("compiler exactness", compiler_exactness),
        ("indicator identity", indicator_identity),
        ("PTF degree LP", ptf_lp),
        ("parity construction and campaign", parity_consistency),
        ("Newman and network approximation", newman_pipeline),
        ("margin pipeline end to end", margin_pipeline),
        ("sensitivity quantities", sensitivity_quantities),
        ("determinism", determinism),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check));
        let took = secs(start.elapsed());
        match result {
            Ok(summary) => println!("PASS {id} {name} ({took}): {summary}"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {id} {name} ({took}): {msg}");
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}
