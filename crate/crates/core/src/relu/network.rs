use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_str, serde_str_vec, to_f64, ExactRational};

/// Affine map `z -> a.z + b`; inside a hidden layer it is followed by `relu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(with = "serde_str_vec")]
    pub a: Vec<ExactRational>,
    #[serde(with = "serde_str")]
    pub b: ExactRational,
}

impl Gate {
    pub fn new(a: Vec<ExactRational>, b: ExactRational) -> Self {
        Gate { a, b }
    }

    /// `||a||_1 + |b|`.
    pub fn norm(&self) -> ExactRational {
        self.a.iter().map(|v| v.abs()).fold(self.b.abs(), |s, v| s + v)
    }

    pub fn affine(&self, z: &[ExactRational]) -> ExactRational {
        self.a.iter().zip(z).fold(self.b.clone(), |s, (a, v)| s + a * v)
    }

    pub fn affine_f64(&self, z: &[f64]) -> f64 {
        self.a.iter().zip(z).fold(to_f64(&self.b), |s, (a, v)| s + to_f64(a) * v)
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }
}

pub fn relu(t: ExactRational) -> ExactRational {
    if t.is_negative() {
        ExactRational::zero()
    } else {
        t
    }
}

/// Scalar-output feed-forward ReLU network with every gate (and the readout)
/// normalized to `||a||_1 + |b| <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkJson", into = "NetworkJson")]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Vec<Gate>>,
    readout: Gate,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct NetworkJson {
    input_dim: usize,
    layers: Vec<Vec<Gate>>,
    readout: Gate,
}

impl TryFrom<NetworkJson> for ReluNetwork {
    type Error = Error;
    fn try_from(raw: NetworkJson) -> Result<Self> {
        ReluNetwork::new(raw.input_dim, raw.layers, raw.readout)
    }
}

impl From<ReluNetwork> for NetworkJson {
    fn from(net: ReluNetwork) -> Self {
        NetworkJson {
            input_dim: net.input_dim,
            layers: net.layers,
            readout: net.readout,
        }
    }
}

impl ReluNetwork {
    pub fn new(input_dim: usize, layers: Vec<Vec<Gate>>, readout: Gate) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidSpec("network input dimension must be positive".into()));
        }
        let mut width = input_dim;
        for (l, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::InvalidSpec(format!("layer {} has no gates", l + 1)));
            }
            for (g, gate) in layer.iter().enumerate() {
                check_gate(gate, width, &(l + 1).to_string(), g + 1)?;
            }
            width = layer.len();
        }
        check_gate(&readout, width, "readout", 1)?;
        Ok(ReluNetwork {
            input_dim,
            layers,
            readout,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn readout(&self) -> &Gate {
        &self.readout
    }

    /// Largest number of gates in a hidden layer (`m`).
    pub fn width(&self) -> usize {
        self.layers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of hidden layers (`l`).
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn eval(&self, z: &[ExactRational]) -> Result<ExactRational> {
        if z.len() != self.input_dim {
            return Err(Error::LengthMismatch {
                expected: self.input_dim,
                got: z.len(),
            });
        }
        let mut act = z.to_vec();
        for layer in &self.layers {
            act = layer.iter().map(|g| relu(g.affine(&act))).collect();
        }
        Ok(self.readout.affine(&act))
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        let mut act = z.to_vec();
        for layer in &self.layers {
            act = layer.iter().map(|g| g.affine_f64(&act).max(0.0)).collect();
        }
        self.readout.affine_f64(&act)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn check_gate(gate: &Gate, width: usize, layer: &str, index: usize) -> Result<()> {
    if gate.a.len() != width {
        return Err(Error::InvalidSpec(format!(
            "gate {index} in layer {layer} has {} weights, expected {width}",
            gate.a.len()
        )));
    }
    let norm = gate.norm();
    if norm > ExactRational::one() {
        return Err(Error::Normalization {
            layer: layer.to_string(),
            gate: index,
            norm: format_rational(&norm),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn single(a: ExactRational) -> Result<ReluNetwork> {
        ReluNetwork::new(1, vec![vec![Gate::new(vec![a], int(0))]], Gate::new(vec![int(1)], int(0)))
    }

    #[test]
    fn single_gate_examples() {
        let net = single(int(1)).unwrap();
        assert_eq!(net.eval(&[ratio(-1, 2)]).unwrap(), int(0));
        assert_eq!(net.eval(&[ratio(1, 2)]).unwrap(), ratio(1, 2));
        assert!(net.eval(&[]).is_err());
        let err = single(int(2)).unwrap_err();
        assert_eq!(
            err,
            Error::Normalization {
                layer: "1".into(),
                gate: 1,
                norm: "2/1".into()
            }
        );
    }

    #[test]
    fn readout_is_normalized_too() {
        let err = ReluNetwork::new(
            1,
            vec![vec![Gate::new(vec![int(1)], int(0))]],
            Gate::new(vec![int(1)], ratio(1, 2)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Normalization { ref layer, .. } if layer == "readout"));
    }

    #[test]
    fn json_roundtrip() {
        let net = single(ratio(-3, 4)).unwrap();
        let text = net.to_json();
        assert!(text.contains("\"inputDim\": 1"));
        assert_eq!(ReluNetwork::from_json(&text).unwrap(), net);
        let bad = text.replace("-3/4", "-5/4");
        assert!(ReluNetwork::from_json(&bad).is_err());
    }
}
