//! Self-attention heads and layers over binary inputs, with exact reference
//! evaluation.
//!
//! A head is parameterized directly by its positive attention weights
//! `w_i(a, b)`, where `a` is the last-token bit `x_n` and `b` is the bit `x_i`.
//! These stand in for `exp(<q(a), k_i(b)>)`; any positive rational is an
//! admissible weight, which keeps every evaluation exact.
//! [`HeadSpec::from_embeddings`] converts numeric query/key embeddings, but that
//! conversion rounds and is not exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{bitstring, Polynomial};
use crate::rational::{
    format_rational, from_f64, is_positive, lcm_of_denominators, parse_rational, ExactRational,
};
use crate::relu::ReluNetwork;

/// Attention weights of one position, indexed `[a][b]`.
pub type WeightTable = [[ExactRational; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct HeadSpec {
    n: usize,
    d: usize,
    weights: Vec<WeightTable>,
    values: Vec<[Vec<ExactRational>; 2]>,
    // integer images (weights and values each scaled by the lcm of their
    // denominators) so evaluation avoids a gcd per addition
    int_weights: Vec<[[BigInt; 2]; 2]>,
    int_values: Vec<[Vec<BigInt>; 2]>,
    value_scale: BigInt,
}

impl HeadSpec {
    /// Validates positivity of every weight and the value dimensions.
    pub fn new(
        n: usize,
        d: usize,
        weights: Vec<WeightTable>,
        values: Vec<[Vec<ExactRational>; 2]>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidSpec(format!("need n >= 1 and d >= 1 (got n={n}, d={d})")));
        }
        if weights.len() != n || values.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} weight tables and value pairs, got {} and {}",
                weights.len(),
                values.len()
            )));
        }
        for (i, table) in weights.iter().enumerate() {
            for (a, row) in table.iter().enumerate() {
                for (b, w) in row.iter().enumerate() {
                    if !is_positive(w) {
                        return Err(Error::InvalidSpec(format!(
                            "weight w_{}({a},{b}) = {} is not positive",
                            i + 1,
                            format_rational(w)
                        )));
                    }
                }
            }
        }
        for (i, pair) in values.iter().enumerate() {
            for (b, v) in pair.iter().enumerate() {
                if v.len() != d {
                    return Err(Error::InvalidSpec(format!(
                        "value v_{}({b}) has length {}, expected {d}",
                        i + 1,
                        v.len()
                    )));
                }
            }
        }
        let w_scale = lcm_of_denominators(weights.iter().flatten().flatten());
        let value_scale = lcm_of_denominators(values.iter().flatten().flatten());
        let to_int = |r: &ExactRational, scale: &BigInt| (r * scale).to_integer();
        let int_weights = weights
            .iter()
            .map(|t| {
                [
                    [to_int(&t[0][0], &w_scale), to_int(&t[0][1], &w_scale)],
                    [to_int(&t[1][0], &w_scale), to_int(&t[1][1], &w_scale)],
                ]
            })
            .collect();
        let int_values = values
            .iter()
            .map(|[v0, v1]| {
                [
                    v0.iter().map(|v| to_int(v, &value_scale)).collect(),
                    v1.iter().map(|v| to_int(v, &value_scale)).collect(),
                ]
            })
            .collect();
        Ok(HeadSpec {
            n,
            d,
            weights,
            values,
            int_weights,
            int_values,
            value_scale,
        })
    }

    /// Approximate conversion from numeric embeddings: `w_i(a,b) =
    /// exp(<query[a], keys[i][b]>)` computed in `f64` and taken as the exact
    /// rational value of the resulting float. Values are converted the same way.
    pub fn from_embeddings(
        query: &[Vec<f64>; 2],
        keys: &[[Vec<f64>; 2]],
        values: &[[Vec<f64>; 2]],
    ) -> Result<Self> {
        let n = keys.len();
        let d = values.first().map(|v| v[0].len()).unwrap_or(0);
        let convert = |x: f64| {
            from_f64(x).ok_or_else(|| Error::InvalidSpec(format!("non-finite embedding value {x}")))
        };
        let mut weights = Vec::with_capacity(n);
        for key in keys {
            let mut table: WeightTable = Default::default();
            for a in 0..2 {
                for b in 0..2 {
                    if query[a].len() != key[b].len() {
                        return Err(Error::InvalidSpec("query/key dimension mismatch".into()));
                    }
                    let score: f64 = query[a].iter().zip(&key[b]).map(|(q, k)| q * k).sum();
                    table[a][b] = convert(score.exp())?;
                }
            }
            weights.push(table);
        }
        let values = values
            .iter()
            .map(|pair| {
                let conv = |v: &Vec<f64>| v.iter().map(|&x| convert(x)).collect::<Result<Vec<_>>>();
                Ok([conv(&pair[0])?, conv(&pair[1])?])
            })
            .collect::<Result<Vec<_>>>()?;
        HeadSpec::new(n, d, weights, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `w_i(a, b)` for 0-based position `i`.
    pub fn weight(&self, i: usize, a: bool, b: bool) -> &ExactRational {
        &self.weights[i][a as usize][b as usize]
    }

    pub fn value(&self, i: usize, b: bool) -> &[ExactRational] {
        &self.values[i][b as usize]
    }

    pub fn weights(&self) -> &[WeightTable] {
        &self.weights
    }

    pub fn values(&self) -> &[[Vec<ExactRational>; 2]] {
        &self.values
    }

    /// Same head with every weight multiplied by `c > 0`.
    pub fn with_scaled_weights(&self, c: &ExactRational) -> Result<HeadSpec> {
        let weights = self
            .weights
            .iter()
            .map(|t| {
                [
                    [&t[0][0] * c, &t[0][1] * c],
                    [&t[1][0] * c, &t[1][1] * c],
                ]
            })
            .collect();
        HeadSpec::new(self.n, self.d, weights, self.values.clone())
    }

    /// Softmax-weighted average of the value vectors, read at the last token.
    pub fn eval(&self, x: &[bool]) -> Result<Vec<ExactRational>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let last = x[self.n - 1] as usize;
        let mut num = vec![BigInt::zero(); self.d];
        let mut den = BigInt::zero();
        for (i, &xi) in x.iter().enumerate() {
            let w = &self.int_weights[i][last][xi as usize];
            for (acc, v) in num.iter_mut().zip(&self.int_values[i][xi as usize]) {
                *acc += w * v;
            }
            den += w;
        }
        den *= &self.value_scale;
        Ok(num.into_iter().map(|v| ExactRational::new(v, den.clone())).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalPost {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
    /// Declared degree bound `p` (not necessarily attained).
    pub degree_bound: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReluPost {
    pub network: ReluNetwork,
    /// Threshold used by margin checks.
    pub threshold: ExactRational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PostProcessing {
    Rational(RationalPost),
    Relu(ReluPost),
}

/// `h` heads sharing `n` and `d`, summed and then post-processed.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    heads: Vec<HeadSpec>,
    post: PostProcessing,
}

impl LayerSpec {
    pub fn new(heads: Vec<HeadSpec>, post: PostProcessing) -> Result<Self> {
        let first = heads
            .first()
            .ok_or_else(|| Error::InvalidSpec("a layer needs at least one head".into()))?;
        let (n, d) = (first.n, first.d);
        if let Some(j) = heads.iter().position(|h| h.n != n || h.d != d) {
            return Err(Error::InvalidSpec(format!(
                "head {} has (n, d) = ({}, {}), expected ({n}, {d})",
                j + 1,
                heads[j].n,
                heads[j].d
            )));
        }
        match &post {
            PostProcessing::Rational(r) => {
                for (name, poly) in [("numerator", &r.numerator), ("denominator", &r.denominator)] {
                    if poly.arity() != d {
                        return Err(Error::InvalidSpec(format!(
                            "post-processing {name} has arity {}, expected d = {d}",
                            poly.arity()
                        )));
                    }
                    if poly.total_degree() > r.degree_bound {
                        return Err(Error::DegreeBoundViolated {
                            declared: r.degree_bound,
                            actual: poly.total_degree(),
                        });
                    }
                }
                if r.denominator.is_zero() {
                    return Err(Error::InvalidSpec("post-processing denominator is zero".into()));
                }
            }
            PostProcessing::Relu(r) => {
                if r.network.input_dim() != d {
                    return Err(Error::InvalidSpec(format!(
                        "network input dimension {} does not match d = {d}",
                        r.network.input_dim()
                    )));
                }
            }
        }
        Ok(LayerSpec { heads, post })
    }

    pub fn heads(&self) -> &[HeadSpec] {
        &self.heads
    }

    pub fn post(&self) -> &PostProcessing {
        &self.post
    }

    pub fn n(&self) -> usize {
        self.heads[0].n
    }

    pub fn d(&self) -> usize {
        self.heads[0].d
    }

    pub fn h(&self) -> usize {
        self.heads.len()
    }

    pub fn rational_post(&self) -> Option<&RationalPost> {
        match &self.post {
            PostProcessing::Rational(r) => Some(r),
            PostProcessing::Relu(_) => None,
        }
    }

    /// Coordinate-wise sum of the head outputs.
    pub fn sum_eval(&self, x: &[bool]) -> Result<Vec<ExactRational>> {
        let mut acc = vec![ExactRational::zero(); self.d()];
        for head in &self.heads {
            for (a, v) in acc.iter_mut().zip(head.eval(x)?) {
                *a += v;
            }
        }
        Ok(acc)
    }

    /// Post-processing applied to the head sum.
    pub fn eval(&self, x: &[bool]) -> Result<ExactRational> {
        let s = self.sum_eval(x)?;
        match &self.post {
            PostProcessing::Rational(r) => {
                let q = r.denominator.eval(&s)?;
                if q.is_zero() {
                    return Err(Error::DenominatorVanished { point: bitstring(x) });
                }
                Ok(r.numerator.eval(&s)? / q)
            }
            PostProcessing::Relu(r) => r.network.eval(&s),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LayerSpecJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LayerSpecJson::from(self)).expect("serializable")
    }
}

// JSON schema, all rationals as "num/den" strings:
// {"n", "d", "heads": [{"weights": n x [[w00, w01], [w10, w11]], "values": n x [v(0), v(1)]}],
//  "post": {"kind": "rational", "p", "numerator", "denominator"} | {"kind": "relu", "network", "tau"}}

#[derive(Serialize, Deserialize)]
struct HeadJson {
    weights: Vec<[[String; 2]; 2]>,
    values: Vec<[Vec<String>; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PostJson {
    Rational {
        p: usize,
        numerator: Polynomial,
        denominator: Polynomial,
    },
    Relu {
        network: ReluNetwork,
        tau: String,
    },
}

#[derive(Serialize, Deserialize)]
struct LayerSpecJson {
    n: usize,
    d: usize,
    heads: Vec<HeadJson>,
    post: PostJson,
}

impl From<&LayerSpec> for LayerSpecJson {
    fn from(layer: &LayerSpec) -> Self {
        let f = format_rational;
        let heads = layer
            .heads
            .iter()
            .map(|h| HeadJson {
                weights: h
                    .weights
                    .iter()
                    .map(|t| [[f(&t[0][0]), f(&t[0][1])], [f(&t[1][0]), f(&t[1][1])]])
                    .collect(),
                values: h
                    .values
                    .iter()
                    .map(|pair| [pair[0].iter().map(f).collect(), pair[1].iter().map(f).collect()])
                    .collect(),
            })
            .collect();
        let post = match &layer.post {
            PostProcessing::Rational(r) => PostJson::Rational {
                p: r.degree_bound,
                numerator: r.numerator.clone(),
                denominator: r.denominator.clone(),
            },
            PostProcessing::Relu(r) => PostJson::Relu {
                network: r.network.clone(),
                tau: f(&r.threshold),
            },
        };
        LayerSpecJson {
            n: layer.n(),
            d: layer.d(),
            heads,
            post,
        }
    }
}

impl TryFrom<LayerSpecJson> for LayerSpec {
    type Error = Error;

    fn try_from(raw: LayerSpecJson) -> Result<Self> {
        let p = |s: &String| parse_rational(s);
        let mut heads = Vec::with_capacity(raw.heads.len());
        for h in raw.heads {
            let weights = h
                .weights
                .iter()
                .map(|t| Ok([[p(&t[0][0])?, p(&t[0][1])?], [p(&t[1][0])?, p(&t[1][1])?]]))
                .collect::<Result<Vec<_>>>()?;
            let values = h
                .values
                .iter()
                .map(|pair| {
                    let conv = |v: &Vec<String>| v.iter().map(p).collect::<Result<Vec<_>>>();
                    Ok([conv(&pair[0])?, conv(&pair[1])?])
                })
                .collect::<Result<Vec<_>>>()?;
            heads.push(HeadSpec::new(raw.n, raw.d, weights, values)?);
        }
        let post = match raw.post {
            PostJson::Rational {
                p,
                numerator,
                denominator,
            } => PostProcessing::Rational(RationalPost {
                numerator,
                denominator,
                degree_bound: p,
            }),
            PostJson::Relu { network, tau } => PostProcessing::Relu(ReluPost {
                network,
                threshold: parse_rational(&tau)?,
            }),
        };
        LayerSpec::new(heads, post)
    }
}

/// Uniform-weight head (`w = 1`) with `v_i(b) = b`: outputs the mean of the bits.
pub fn uniform_mean_head(n: usize) -> HeadSpec {
    scaled_mean_head(n, ExactRational::zero(), ExactRational::one())
}

/// Uniform-weight head with `v_i(b) = offset + slope * b` (`d = 1`).
pub fn scaled_mean_head(n: usize, offset: ExactRational, slope: ExactRational) -> HeadSpec {
    let one = ExactRational::one();
    let weights = vec![[[one.clone(), one.clone()], [one.clone(), one]]; n];
    let values = vec![[vec![offset.clone()], vec![&offset + &slope]]; n];
    HeadSpec::new(n, 1, weights, values).expect("valid uniform head")
}

/// Whether every head sum over the cube lies in `[-1, 1]^d`; returns the first
/// offending point otherwise.
pub fn head_sums_in_unit_box(layer: &LayerSpec) -> Result<Option<Vec<bool>>> {
    let n = layer.n();
    for idx in 0..(1usize << n) {
        let x = crate::poly::bits_of(n, idx);
        if layer.sum_eval(&x)?.iter().any(|s| s.abs() > ExactRational::one()) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
