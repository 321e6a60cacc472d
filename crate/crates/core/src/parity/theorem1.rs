//! Consistency of compiled layers with the `hp >= n/4` lower bound for parity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attention::LayerSpec;
use crate::compiler::{compile_layer, CompileOptions};
use crate::error::{Error, Result};
use crate::rational::{format_rational, ExactRational};
use crate::sampling::{random_rational_layer, trial_rng};

/// One inequality check. `satisfied` is the implication
/// "sign-represents parity => hp >= n/4"; `contradiction` is its negation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub theorem: String,
    pub n: usize,
    pub h: usize,
    pub p: usize,
    pub sign_represents: bool,
    /// `n/4` as "num/den".
    pub bound: String,
    pub hp: usize,
    pub hp_meets_bound: bool,
    pub satisfied: bool,
    pub contradiction: bool,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub witness: String,
}

pub fn quarter(n: usize) -> ExactRational {
    ExactRational::new(n.into(), 4.into())
}

/// Whether `signs` (one of -1, 0, 1 per cube point) sign-represents parity.
pub fn signs_represent_parity(signs: &[i8]) -> bool {
    signs
        .iter()
        .enumerate()
        .all(|(x, &s)| (s > 0) == (x.count_ones() % 2 == 1))
}

pub(crate) fn bound_report(theorem: &str, n: usize, h: usize, p: usize, represents: bool, witness: String) -> BoundReport {
    let hp = h * p;
    let meets = ExactRational::from_integer(hp.into()) >= quarter(n);
    BoundReport {
        theorem: theorem.into(),
        n,
        h,
        p,
        sign_represents: represents,
        bound: format_rational(&quarter(n)),
        hp,
        hp_meets_bound: meets,
        satisfied: !represents || meets,
        contradiction: represents && !meets,
        seed: None,
        trials: None,
        witness,
    }
}

/// Compiles `layer` and checks exhaustively whether it sign-represents parity.
pub fn theorem1_report(layer: &LayerSpec, cap: usize) -> Result<BoundReport> {
    let n = layer.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let compiled = compile_layer(layer, &CompileOptions { cap, assume_nonvanishing: false })?;
    let signs = compiled.function.cube_signs()?;
    let represents = signs_represent_parity(&signs);
    let h = layer.h();
    let p = compiled.declared_p;
    let witness = if !represents {
        let x = (0..signs.len())
            .find(|&x| (signs[x] > 0) != (x.count_ones() % 2 == 1))
            .expect("some point disagrees");
        format!(
            "does not sign-represent parity: sign differs at x = {}",
            crate::poly::bitstring(&crate::poly::bits_of(n, x))
        )
    } else if h * p * 4 >= n {
        format!("sign-represents parity with hp = {} >= {}", h * p, format_rational(&quarter(n)))
    } else {
        format!("CONTRADICTION: sign-represents parity with hp = {} < n/4", h * p)
    };
    Ok(bound_report("1", n, h, p, represents, witness))
}

/// Settings for a randomized search for low-degree layers that sign-represent parity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub max_d: usize,
}

/// `(h, p)` pairs with `p >= 1` and `2hp < n/2`.
pub fn admissible_shapes(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for h in 1..=n {
        for p in 1..=n {
            if 4 * h * p < n {
                out.push((h, p));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeTally {
    pub h: usize,
    pub p: usize,
    pub trials: u64,
    pub sign_representations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignReport {
    pub theorem: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub bound: String,
    pub sign_representations_found: u64,
    pub contradictions: u64,
    pub rejected_layers: u64,
    pub satisfied: bool,
    pub shapes: Vec<ShapeTally>,
    pub note: String,
}

struct Trial {
    shape: usize,
    represents: bool,
    rejected: u64,
}

/// Samples `trials` layers with `2hp < n/2` (one seeded stream per trial) and
/// counts how many sign-represent parity. Any hit would contradict the bound.
pub fn falsification_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let shapes = admissible_shapes(cfg.n);
    if shapes.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no (h, p) with p >= 1 satisfies 2hp < n/2 for n = {}",
            cfg.n
        )));
    }
    if cfg.max_d == 0 {
        return Err(Error::InvalidParameter("max_d must be positive".into()));
    }
    if cfg.n > crate::compiler::DEFAULT_EXHAUSTIVE_CAP {
        return Err(Error::CapExceeded { n: cfg.n, cap: crate::compiler::DEFAULT_EXHAUSTIVE_CAP });
    }
    let results: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let mut rng = trial_rng(cfg.seed, t);
            let shape = rand::Rng::random_range(&mut rng, 0..shapes.len());
            let d = rand::Rng::random_range(&mut rng, 1..=cfg.max_d);
            let (h, p) = shapes[shape];
            // Q~ = Q(head sum) S^p with S > 0, so the compiler's exhaustive
            // denominator check rejects exactly the layers undefined somewhere
            let mut rejected = 0;
            loop {
                let layer = random_rational_layer(&mut rng, cfg.n, d, h, p);
                match compile_layer(&layer, &CompileOptions::default()) {
                    Ok(compiled) => {
                        let represents = signs_represent_parity(&compiled.function.cube_signs()?);
                        return Ok(Trial { shape, represents, rejected });
                    }
                    Err(Error::DenominatorVanished { .. }) => rejected += 1,
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut tallies: Vec<ShapeTally> = shapes
        .iter()
        .map(|&(h, p)| ShapeTally { h, p, trials: 0, sign_representations: 0 })
        .collect();
    let mut rejected = 0;
    for t in &results {
        tallies[t.shape].trials += 1;
        tallies[t.shape].sign_representations += t.represents as u64;
        rejected += t.rejected;
    }
    let found: u64 = tallies.iter().map(|s| s.sign_representations).sum();
    Ok(CampaignReport {
        theorem: "1".into(),
        n: cfg.n,
        seed: Some(cfg.seed),
        trials: Some(cfg.trials),
        bound: format_rational(&quarter(cfg.n)),
        sign_representations_found: found,
        // every sampled shape has hp < n/4
        contradictions: found,
        rejected_layers: rejected,
        satisfied: found == 0,
        shapes: tallies,
        note: "consistency check only: finding no counterexample does not prove the bound".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::{uniform_mean_head, PostProcessing, RationalPost};
    use crate::parity::build_parity_layer;
    use crate::poly::Polynomial;

    #[test]
    fn parity_layer_satisfies() {
        let r = theorem1_report(&build_parity_layer(8).unwrap(), 20).unwrap();
        assert!(r.sign_represents && r.satisfied && !r.contradiction);
        assert_eq!((r.h, r.p, r.hp, r.bound.as_str()), (1, 8, 8, "2/1"));
    }

    #[test]
    fn identity_post_does_not_represent() {
        let layer = LayerSpec::new(
            vec![uniform_mean_head(4)],
            PostProcessing::Rational(RationalPost {
                numerator: Polynomial::var(1, 0).unwrap(),
                denominator: Polynomial::one(1),
                degree_bound: 1,
            }),
        )
        .unwrap();
        let r = theorem1_report(&layer, 20).unwrap();
        assert!(!r.sign_represents);
        assert!(r.satisfied);
        assert!(r.witness.contains("does not sign-represent"));
        assert!(matches!(theorem1_report(&layer, 3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn shapes() {
        assert_eq!(admissible_shapes(6), vec![(1, 1)]);
        assert_eq!(admissible_shapes(8), vec![(1, 1)]);
        assert!(admissible_shapes(4).is_empty());
        assert_eq!(admissible_shapes(9).len(), 3);
    }

    #[test]
    fn small_campaign_is_deterministic() {
        let cfg = CampaignConfig { n: 6, trials: 40, seed: 11, max_d: 3 };
        let a = falsification_campaign(&cfg).unwrap();
        let b = falsification_campaign(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sign_representations_found, 0);
        assert_eq!(a.shapes[0].trials, 40);
    }
}
