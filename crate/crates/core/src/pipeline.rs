//! Full analysis of a state set: pad, decompose, build `T⊥` for each
//! requested initiating party, decide, and construct and simulate the
//! protocol when one exists.

use alloc::vec::Vec;

use crate::hermspace::EigenFrame;
use crate::mas::{decide, MasDecision, Verdict};
use crate::oracle::random_feasible_frame_search;
use crate::protocol::{construct_protocol, simulate, Protocol, SimulationStats};
use crate::states::{spectral_decompose, DegeneracyWarning, SpectralStateSet, StateSet};
use crate::tspace::{build_pair_operators, build_tspaces};
use crate::{Result, Side, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub tol: f64,
    pub seed: u64,
    pub sides: Vec<Side>,
    /// Monte-Carlo trials per found protocol; 0 skips simulation.
    pub trials: u64,
    /// Oracle restarts tried on inconclusive sides; 0 disables the search.
    pub oracle_attempts: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { tol: DEFAULT_TOL, seed: 0, sides: Side::BOTH.to_vec(), trials: 0, oracle_attempts: 0 }
    }
}

/// A frame found by the oracle where the decision procedure could not
/// settle the question, with the protocol it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub frame: EigenFrame,
    pub protocol: Protocol,
    pub simulation: Option<SimulationStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SideAnalysis {
    pub side: Side,
    pub dim_t: usize,
    pub dim_tperp: usize,
    pub identity_residual: f64,
    pub decision: MasDecision,
    pub protocol: Option<Protocol>,
    pub simulation: Option<SimulationStats>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub d_a: usize,
    pub d_b: usize,
    /// Local dimension after padding.
    pub d: usize,
    pub n: usize,
    pub warnings: Vec<DegeneracyWarning>,
    pub spectral: SpectralStateSet,
    pub sides: Vec<SideAnalysis>,
}

pub fn analyze(set: &StateSet, cfg: &AnalysisConfig) -> Result<Analysis> {
    let padded = set.pad_to_square();
    let spectral = spectral_decompose(&padded, cfg.tol)?;
    let mut sides = Vec::with_capacity(cfg.sides.len());
    for &side in &cfg.sides {
        sides.push(analyze_side(&spectral, side, cfg)?);
    }
    Ok(Analysis {
        d_a: set.d_a(),
        d_b: set.d_b(),
        d: spectral.dim(),
        n: spectral.len(),
        warnings: spectral.warnings().to_vec(),
        spectral,
        sides,
    })
}

pub fn analyze_side(spec: &SpectralStateSet, side: Side, cfg: &AnalysisConfig) -> Result<SideAnalysis> {
    let ops = build_pair_operators(spec, side);
    let ts = build_tspaces(&ops, cfg.tol)?;
    let decision = decide(&ts, cfg.tol, cfg.seed)?;
    let run = |proto: &Protocol| -> Result<Option<SimulationStats>> {
        if cfg.trials == 0 {
            return Ok(None);
        }
        simulate(spec, proto, cfg.trials, cfg.seed).map(Some)
    };
    let mut protocol = None;
    let mut simulation = None;
    let mut witness = None;
    match &decision.verdict {
        Verdict::DistinguishableProjective { frame, .. } => {
            let proto = construct_protocol(spec, frame, side, cfg.tol)?;
            simulation = run(&proto)?;
            protocol = Some(proto);
        }
        Verdict::Inconclusive if cfg.oracle_attempts > 0 => {
            if let Some(frame) = random_feasible_frame_search(&ops, cfg.oracle_attempts, cfg.seed, cfg.tol) {
                if let Ok(proto) = construct_protocol(spec, &frame, side, cfg.tol) {
                    let sim = run(&proto)?;
                    witness = Some(Witness { frame, protocol: proto, simulation: sim });
                }
            }
        }
        _ => {}
    }
    Ok(SideAnalysis {
        side,
        dim_t: ts.t.len(),
        dim_tperp: ts.tperp.len(),
        identity_residual: ts.identity_residual,
        decision,
        protocol,
        simulation,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::bell_family;

    #[test]
    fn example_one_both_sides() {
        let set = bell_family(4, &[(0, 0), (0, 1), (1, 0), (3, 3)], 1e-10).unwrap();
        let cfg = AnalysisConfig { trials: 2000, ..AnalysisConfig::default() };
        let a = analyze(&set, &cfg).unwrap();
        assert_eq!(a.sides.len(), 2);
        for s in &a.sides {
            assert_eq!((s.dim_t, s.dim_tperp), (12, 4));
            assert!(s.simulation.as_ref().unwrap().perfect());
        }
    }

    #[test]
    fn oracle_witness_on_inconclusive_side() {
        let set = bell_family(4, &[(0, 0), (0, 1), (1, 2), (3, 0)], 1e-10).unwrap();
        let cfg = AnalysisConfig { sides: alloc::vec![Side::A], trials: 1000, oracle_attempts: 64, ..AnalysisConfig::default() };
        let a = analyze(&set, &cfg).unwrap();
        let s = &a.sides[0];
        assert_eq!(s.decision.verdict, Verdict::Inconclusive);
        let w = s.witness.as_ref().expect("oracle frame");
        assert!(w.protocol.op_violation <= 1e-10);
        assert!(w.simulation.as_ref().unwrap().perfect());
    }
}
