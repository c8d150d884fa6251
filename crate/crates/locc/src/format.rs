//! File formats: state sets and protocols.
//!
//! State sets use
//! `{"dA": int, "dB": int, "states": [{"type": "pure", "vector": [[re, im], ...]}
//! | {"type": "mixed", "matrix": [[[re, im], ...], ...]}]}` with component
//! `a * dB + b` holding the amplitude of `|a>_A |b>_B`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use locc_core::protocol::{AliceMeasurement, BobBranch, Protocol};
use locc_core::states::{StateEntry, StateSet};
use locc_core::{Side, C64};

use crate::error::{CliError, Result};

pub type Complex = [f64; 2];

fn pair(z: C64) -> Complex {
    [z.re, z.im]
}

fn complex(p: &Complex) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vector_doc(v: &DVector<C64>) -> Vec<Complex> {
    v.iter().map(|&z| pair(z)).collect()
}

pub fn vector_from_doc(v: &[Complex]) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().map(complex))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetDoc {
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub states: Vec<StateDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateDoc {
    Pure { vector: Vec<Complex> },
    Mixed { matrix: Vec<Vec<Complex>> },
}

impl StateSetDoc {
    pub fn from_set(set: &StateSet) -> Self {
        let states = set
            .states()
            .iter()
            .map(|s| match s {
                StateEntry::Pure(v) => StateDoc::Pure { vector: vector_doc(v) },
                StateEntry::Mixed(m) => StateDoc::Mixed {
                    matrix: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect()).collect(),
                },
            })
            .collect();
        StateSetDoc { d_a: set.d_a(), d_b: set.d_b(), states }
    }

    /// Shape checks, then the core validation (normalization, positivity,
    /// orthogonality) at `tol`.
    pub fn to_set(&self, tol: f64) -> Result<StateSet> {
        let n = self.d_a * self.d_b;
        let mut entries = Vec::with_capacity(self.states.len());
        for (idx, s) in self.states.iter().enumerate() {
            match s {
                StateDoc::Pure { vector } => {
                    if vector.len() != n {
                        return Err(CliError::Schema(format!(
                            "state {idx}: vector has {} entries, expected dA*dB = {n}",
                            vector.len()
                        )));
                    }
                    entries.push(StateEntry::Pure(vector_from_doc(vector)));
                }
                StateDoc::Mixed { matrix } => {
                    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                        return Err(CliError::Schema(format!("state {idx}: matrix must be {n}x{n}")));
                    }
                    entries.push(StateEntry::Mixed(DMatrix::from_fn(n, n, |r, c| complex(&matrix[r][c]))));
                }
            }
        }
        Ok(StateSet::new(self.d_a, self.d_b, entries, tol)?)
    }
}

pub fn parse_state_set(text: &str, tol: f64) -> Result<StateSet> {
    let doc: StateSetDoc = serde_json::from_str(text)?;
    doc.to_set(tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    pub blocks: Vec<Vec<Vec<Complex>>>,
    pub remainder: Vec<Vec<Complex>>,
    pub probabilities: Vec<f64>,
    pub reachable: Vec<bool>,
}

/// A protocol as written by `analyze --protocol-out` and read by
/// `simulate --protocol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolDoc {
    pub side: String,
    pub alice: Vec<Vec<Complex>>,
    pub completeness_residual: f64,
    pub bob: Vec<BranchDoc>,
    pub op_violation: f64,
}

pub fn parse_side(s: &str) -> Result<Side> {
    match s {
        "A" | "a" => Ok(Side::A),
        "B" | "b" => Ok(Side::B),
        other => Err(CliError::Schema(format!("side must be A or B, got {other:?}"))),
    }
}

impl ProtocolDoc {
    pub fn from_protocol(p: &Protocol) -> Self {
        let vecs = |vs: &[DVector<C64>]| vs.iter().map(vector_doc).collect::<Vec<_>>();
        ProtocolDoc {
            side: p.alice.side.as_str().to_string(),
            alice: vecs(&p.alice.vectors),
            completeness_residual: p.alice.completeness_residual,
            bob: p
                .bob
                .iter()
                .map(|b| BranchDoc {
                    blocks: b.blocks.iter().map(|blk| vecs(blk)).collect(),
                    remainder: vecs(&b.remainder),
                    probabilities: b.probabilities.clone(),
                    reachable: b.reachable.clone(),
                })
                .collect(),
            op_violation: p.op_violation,
        }
    }

    /// Rebuilds the protocol. Nothing beyond shapes is checked, so a
    /// tampered file simulates as written.
    pub fn to_protocol(&self) -> Result<Protocol> {
        let side = parse_side(&self.side)?;
        let vecs = |vs: &[Vec<Complex>]| vs.iter().map(|v| vector_from_doc(v)).collect::<Vec<_>>();
        let alice = AliceMeasurement::new(side, vecs(&self.alice))?;
        let d = alice.dim();
        let bob: Vec<BobBranch> = self
            .bob
            .iter()
            .map(|b| BobBranch {
                blocks: b.blocks.iter().map(|blk| vecs(blk)).collect(),
                remainder: vecs(&b.remainder),
                probabilities: b.probabilities.clone(),
                reachable: b.reachable.clone(),
            })
            .collect();
        let bad_len = bob
            .iter()
            .flat_map(|b| b.blocks.iter().flatten().chain(&b.remainder))
            .any(|v| v.len() != d);
        if bad_len {
            return Err(CliError::Schema(format!("every finisher vector must have length {d}")));
        }
        Ok(Protocol { alice, bob, op_violation: self.op_violation })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use locc_core::states::bell_family;

    #[test]
    fn state_set_round_trip() {
        let set = bell_family(3, &[(0, 1), (2, 2)], 1e-10).unwrap();
        let text = serde_json::to_string(&StateSetDoc::from_set(&set)).unwrap();
        assert_eq!(parse_state_set(&text, 1e-10).unwrap(), set);
    }

    #[test]
    fn reports_overlap_of_non_orthogonal_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"dA":2,"dB":2,"states":[
                {{"type":"pure","vector":[[1,0],[0,0],[0,0],[0,0]]}},
                {{"type":"pure","vector":[[{h},0],[0,0],[0,0],[{h},0]]}}]}}"#
        );
        match parse_state_set(&text, 1e-10) {
            Err(CliError::Core(locc_core::Error::Orthogonality { first: 0, second: 1, overlap })) => {
                assert!((overlap - h).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_length_and_unknown_type() {
        let short = r#"{"dA":2,"dB":2,"states":[{"type":"pure","vector":[[1,0]]}]}"#;
        assert!(matches!(parse_state_set(short, 1e-10), Err(CliError::Schema(_))));
        let odd = r#"{"dA":2,"dB":2,"states":[{"type":"ket","vector":[[1,0]]}]}"#;
        assert!(matches!(parse_state_set(odd, 1e-10), Err(CliError::Json(_))));
    }

    #[test]
    fn mixed_state_parses() {
        let text = r#"{"dA":1,"dB":2,"states":[{"type":"mixed","matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}]}"#;
        let set = parse_state_set(text, 1e-10).unwrap();
        assert_eq!(set.len(), 1);
    }
}
