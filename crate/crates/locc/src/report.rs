//! Serializable reports. Field order here is the key order in the output.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use locc_core::hermspace::EigenFrame;
use locc_core::mas::{Evidence, Verdict};
use locc_core::oracle::GenericityReport;
use locc_core::pipeline::{Analysis, AnalysisConfig, SideAnalysis};
use locc_core::protocol::SimulationStats;

use crate::format::{vector_doc, Complex, ProtocolDoc};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub d_a: usize,
    pub d_b: usize,
    pub d: usize,
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    pub trials: u64,
    pub oracle_attempts: usize,
    pub degeneracy_warnings: Vec<DegeneracyReport>,
    pub sides: Vec<SideReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyReport {
    pub state: usize,
    pub eigenvalues: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SideReport {
    pub side: &'static str,
    pub dim_t: usize,
    pub dim_tperp: usize,
    pub identity_residual: f64,
    pub verdict: VerdictReport,
    pub frame: Option<Vec<Vec<Complex>>>,
    pub protocol: Option<ProtocolDoc>,
    pub simulation: Option<SimulationReport>,
    pub oracle_witness: Option<WitnessReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub tag: &'static str,
    pub reason: &'static str,
    pub evidence: EvidenceReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub t: Option<usize>,
    pub max_commutator: Option<f64>,
    pub dim_commutator: Option<usize>,
    pub threshold: Option<i64>,
    pub t_bound: Option<f64>,
    pub omega_ranks: Vec<usize>,
    pub support_intersection_dim: Option<usize>,
}

impl From<&Evidence> for EvidenceReport {
    fn from(e: &Evidence) -> Self {
        EvidenceReport {
            t: e.t,
            max_commutator: e.max_commutator,
            dim_commutator: e.dim_commutator,
            threshold: e.threshold,
            t_bound: e.t_bound,
            omega_ranks: e.omega_ranks.clone(),
            support_intersection_dim: e.support_intersection_dim,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub frame: Vec<Vec<Complex>>,
    pub protocol: ProtocolDoc,
    pub simulation: Option<SimulationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateTally {
    pub trials: u64,
    pub successes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub perfect: bool,
    pub note: Option<&'static str>,
    pub per_state: Vec<StateTally>,
    pub per_outcome: Vec<u64>,
}

impl From<&SimulationStats> for SimulationReport {
    fn from(s: &SimulationStats) -> Self {
        SimulationReport {
            trials: s.trials,
            seed: s.seed,
            successes: s.successes,
            success_rate: s.success_rate(),
            perfect: s.perfect(),
            note: (s.trials == 0).then_some("no trials"),
            per_state: s.per_state.iter().map(|&(trials, successes)| StateTally { trials, successes }).collect(),
            per_outcome: s.per_outcome.clone(),
        }
    }
}

fn frame_doc(frame: &EigenFrame) -> Vec<Vec<Complex>> {
    frame.vectors().iter().map(vector_doc).collect()
}

impl SideReport {
    pub fn from_side(s: &SideAnalysis) -> Self {
        let frame = match &s.decision.verdict {
            Verdict::DistinguishableProjective { frame, .. } => Some(frame_doc(frame)),
            _ => None,
        };
        SideReport {
            side: s.side.as_str(),
            dim_t: s.dim_t,
            dim_tperp: s.dim_tperp,
            identity_residual: s.identity_residual,
            verdict: VerdictReport {
                tag: s.decision.verdict.tag(),
                reason: s.decision.reason.as_str(),
                evidence: EvidenceReport::from(&s.decision.evidence),
            },
            frame,
            protocol: s.protocol.as_ref().map(ProtocolDoc::from_protocol),
            simulation: s.simulation.as_ref().map(SimulationReport::from),
            oracle_witness: s.witness.as_ref().map(|w| WitnessReport {
                frame: frame_doc(&w.frame),
                protocol: ProtocolDoc::from_protocol(&w.protocol),
                simulation: w.simulation.as_ref().map(SimulationReport::from),
            }),
        }
    }
}

impl AnalysisReport {
    pub fn new(analysis: &Analysis, cfg: &AnalysisConfig, input: &[u8]) -> Self {
        AnalysisReport {
            tool: "locc",
            version: VERSION,
            input_sha256: sha256_hex(input),
            d_a: analysis.d_a,
            d_b: analysis.d_b,
            d: analysis.d,
            n: analysis.n,
            tol: cfg.tol,
            seed: cfg.seed,
            trials: cfg.trials,
            oracle_attempts: cfg.oracle_attempts,
            degeneracy_warnings: analysis
                .warnings
                .iter()
                .map(|w| DegeneracyReport { state: w.state, eigenvalues: [w.eigenvalues.0, w.eigenvalues.1] })
                .collect(),
            sides: analysis.sides.iter().map(SideReport::from_side).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub protocol_source: String,
    pub side: &'static str,
    pub op_violation: f64,
    pub simulation: SimulationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityDoc {
    pub tool: &'static str,
    pub version: &'static str,
    pub d: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub dim_histogram: BTreeMap<usize, usize>,
    pub det_diagnostics: Option<Vec<f64>>,
}

impl From<&GenericityReport> for GenericityDoc {
    fn from(r: &GenericityReport) -> Self {
        GenericityDoc {
            tool: "locc",
            version: VERSION,
            d: r.d,
            n: r.n,
            samples: r.samples,
            seed: r.seed,
            dim_histogram: r.dim_histogram.iter().map(|(&k, &v)| (k, v)).collect(),
            det_diagnostics: r.det_diagnostics.clone(),
        }
    }
}
