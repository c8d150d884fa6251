//! One-way protocols: the initiator's rank-one measurement, the
//! orthogonality-preserving check, the finisher's conditional measurements
//! and Monte-Carlo simulation.
//!
//! A frame found in `T⊥` diagonalizes the pair operators in the starred
//! picture; the initiator measures the entrywise conjugate vectors. For
//! outcome `k` the finisher holds `W_ij · conj(k̃)` (unnormalized), with `W`
//! oriented as in [`crate::tspace::oriented_coefficients`].

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::hermspace::EigenFrame;
use crate::linalg;
use crate::random;
use crate::states::SpectralStateSet;
use crate::tspace::{oriented_coefficients, PairIndex, PairOperators};
use crate::{Error, Result, Side, C64};

/// Trials per independently seeded chunk in [`simulate`].
pub const SIMULATION_CHUNK: usize = 1024;

/// Rank-one measurement `{|k̃><k̃|}` of the initiating party.
#[derive(Clone, Debug, PartialEq)]
pub struct AliceMeasurement {
    pub side: Side,
    pub vectors: Vec<DVector<C64>>,
    /// `‖Σ_k |k̃><k̃| - 1‖_HS`.
    pub completeness_residual: f64,
}

impl AliceMeasurement {
    pub fn new(side: Side, vectors: Vec<DVector<C64>>) -> Result<Self> {
        let d = vectors.first().map_or(0, |v| v.len());
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for v in &vectors {
            acc += v * v.adjoint();
        }
        let completeness_residual = (acc - DMatrix::<C64>::identity(d, d)).norm();
        Ok(AliceMeasurement { side, vectors, completeness_residual })
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn conjugated(&self) -> AliceMeasurement {
        AliceMeasurement {
            side: self.side,
            vectors: self.vectors.iter().map(|v| v.map(|z| z.conj())).collect(),
            completeness_residual: self.completeness_residual,
        }
    }
}

/// The measured vectors are the conjugates of the frame vectors.
pub fn alice_from_frame(frame: &EigenFrame, side: Side) -> AliceMeasurement {
    let vectors: Vec<DVector<C64>> = frame.vectors().into_iter().map(|v| v.map(|z| z.conj())).collect();
    AliceMeasurement::new(side, vectors).expect("frame columns share one length")
}

/// `max_𝐢 |<v|W_𝐢|v>|` and whether it is within `tol`.
pub fn vector_feasible(v: &DVector<C64>, ops: &PairOperators, tol: f64) -> (bool, f64) {
    let worst = ops
        .operators()
        .iter()
        .map(|o| v.dotc(&(&o.w * v)).norm())
        .fold(0.0, f64::max);
    (worst <= tol, worst)
}

/// Largest orthogonality violation and where it happened.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpCheck {
    pub max_violation: f64,
    pub worst: Option<(usize, PairIndex)>,
}

/// Partial inner product of `<k|` with the initiator's factor of `psi`.
fn contract(psi: &DVector<C64>, k: &DVector<C64>, side: Side, d: usize) -> DVector<C64> {
    let mut out = DVector::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let amp = psi[a * d + b];
            match side {
                Side::A => out[b] += k[a].conj() * amp,
                Side::B => out[a] += k[b].conj() * amp,
            }
        }
    }
    out
}

/// `max |<ψ_ij| (|k̃><k̃| ⊗ 1) |ψ_i'j'>|` over outcomes `k` and pairs
/// `i < i'`, evaluated on the state vectors themselves.
pub fn verify_op(spec: &SpectralStateSet, alice: &AliceMeasurement) -> OpCheck {
    let d = spec.dim();
    let mut check = OpCheck { max_violation: 0.0, worst: None };
    for (k, kv) in alice.vectors.iter().enumerate() {
        let residuals: Vec<Vec<DVector<C64>>> = spec
            .states()
            .iter()
            .map(|comps| comps.iter().map(|c| contract(&c.vector, kv, alice.side, d)).collect())
            .collect();
        for i in 0..residuals.len() {
            for ip in (i + 1)..residuals.len() {
                for (j, r) in residuals[i].iter().enumerate() {
                    for (jp, rp) in residuals[ip].iter().enumerate() {
                        let value = r.dotc(rp).norm();
                        if value > check.max_violation {
                            check.max_violation = value;
                            check.worst = Some((k, PairIndex { i, i_prime: ip, j, j_prime: jp }));
                        }
                    }
                }
            }
        }
    }
    check
}

/// The finisher's measurement after one initiator outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct BobBranch {
    /// Orthonormal vectors spanning the block for each state index.
    pub blocks: Vec<Vec<DVector<C64>>>,
    /// Orthonormal completion of the blocks.
    pub remainder: Vec<DVector<C64>>,
    /// Born probability of this outcome for each state.
    pub probabilities: Vec<f64>,
    pub reachable: Vec<bool>,
}

impl BobBranch {
    pub fn is_reachable(&self) -> bool {
        self.reachable.iter().any(|&r| r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub alice: AliceMeasurement,
    pub bob: Vec<BobBranch>,
    pub op_violation: f64,
}

/// Unnormalized residual on the finisher's side for outcome `k`.
pub fn residual(w: &DMatrix<C64>, k: &DVector<C64>, side: Side) -> DVector<C64> {
    oriented_coefficients(w, side) * k.map(|z| z.conj())
}

/// Builds the finisher's blocks. Fails with [`Error::OpViolation`] when the
/// measurement does not preserve orthogonality within `tol`.
pub fn bob_measurements(spec: &SpectralStateSet, alice: &AliceMeasurement, tol: f64) -> Result<Protocol> {
    let check = verify_op(spec, alice);
    if check.max_violation > tol {
        let (outcome, pair) = check.worst.expect("violation has a location");
        return Err(Error::OpViolation { outcome, pair, value: check.max_violation });
    }
    let d = spec.dim();
    let overlap_tol = libm::sqrt(tol);
    let mut bob = Vec::with_capacity(alice.len());
    for (k, kv) in alice.vectors.iter().enumerate() {
        let mut blocks = Vec::with_capacity(spec.len());
        let mut probabilities = Vec::with_capacity(spec.len());
        let mut reachable = Vec::with_capacity(spec.len());
        for comps in spec.states() {
            let mut cols = DMatrix::<C64>::zeros(d, comps.len());
            let mut p = 0.0;
            for (j, c) in comps.iter().enumerate() {
                let r = residual(&c.coefficients, kv, alice.side);
                p += c.eigenvalue * r.norm_squared();
                cols.set_column(j, &r);
            }
            let basis = linalg::complex_column_space(&cols, tol);
            reachable.push(!basis.is_empty());
            probabilities.push(p);
            blocks.push(basis);
        }
        let mut worst = 0.0f64;
        for i in 0..blocks.len() {
            for ip in (i + 1)..blocks.len() {
                for x in &blocks[i] {
                    for y in &blocks[ip] {
                        worst = worst.max(x.dotc(y).norm());
                    }
                }
            }
        }
        if worst > overlap_tol {
            return Err(Error::InternalConsistency(alloc::format!(
                "finisher blocks at outcome {k} overlap by {worst:e}"
            )));
        }
        let remainder = completion(&blocks, d);
        bob.push(BobBranch { blocks, remainder, probabilities, reachable });
    }
    Ok(Protocol { alice: alice.clone(), bob, op_violation: check.max_violation })
}

fn completion(blocks: &[Vec<DVector<C64>>], d: usize) -> Vec<DVector<C64>> {
    let mut proj = DMatrix::<C64>::identity(d, d);
    let mut used = 0;
    for v in blocks.iter().flatten() {
        proj -= v * v.adjoint();
        used += 1;
    }
    if used >= d {
        return Vec::new();
    }
    let (_, vectors) = linalg::herm_eigen_sorted(proj);
    (used..d)
        .map(|c| {
            let mut v: DVector<C64> = vectors.column(c).into_owned();
            linalg::normalize_phase(&mut v);
            v
        })
        .collect()
}

/// Frame to verified protocol.
///
/// The conjugate convention is always used. If it fails while the
/// unconjugated vectors would pass, [`Error::Convention`] is raised instead of
/// switching silently.
pub fn construct_protocol(spec: &SpectralStateSet, frame: &EigenFrame, side: Side, tol: f64) -> Result<Protocol> {
    let alice = alice_from_frame(frame, side);
    let conjugated = verify_op(spec, &alice).max_violation;
    if conjugated > tol {
        let unconjugated = verify_op(spec, &alice.conjugated()).max_violation;
        if unconjugated <= tol {
            return Err(Error::Convention { conjugated, unconjugated });
        }
    }
    bob_measurements(spec, &alice, tol)
}

/// Tallies of a simulation run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationStats {
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
    /// `(trials, successes)` per state index.
    pub per_state: Vec<(u64, u64)>,
    /// Trials that produced each initiator outcome.
    pub per_outcome: Vec<u64>,
}

impl SimulationStats {
    /// `1.0` for an empty run.
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn perfect(&self) -> bool {
        self.successes == self.trials
    }
}

/// Cumulative distribution with a trailing "fall through" index.
fn sample_index(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random::<f64>() * total.max(1.0);
    let mut acc = 0.0;
    for (idx, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return idx;
        }
    }
    weights.len()
}

/// Alice's outcome weights and, per outcome, Bob's block weights.
type WeightTable = (Vec<f64>, Vec<Vec<f64>>);

/// Monte-Carlo run of the protocol. Each trial draws a state uniformly, an
/// eigencomponent by weight, the initiator outcome by the Born rule and one
/// of the finisher's blocks by the Born rule; it succeeds when the block's
/// state index is the true one. Trials are split into chunks of
/// [`SIMULATION_CHUNK`], chunk `c` using stream `c` of `seed`, so tallies do
/// not depend on how chunks are scheduled.
pub fn simulate(spec: &SpectralStateSet, proto: &Protocol, trials: u64, seed: u64) -> Result<SimulationStats> {
    let n = spec.len();
    if proto.bob.len() != proto.alice.len() {
        return Err(Error::DimensionMismatch { expected: proto.alice.len(), found: proto.bob.len() });
    }
    if let Some(b) = proto.bob.iter().find(|b| b.blocks.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.blocks.len() });
    }
    let side = proto.alice.side;
    let mut stats = SimulationStats {
        trials,
        seed,
        per_state: alloc::vec![(0, 0); n],
        per_outcome: alloc::vec![0; proto.alice.len()],
        ..SimulationStats::default()
    };
    if n == 0 || trials == 0 {
        return Ok(stats);
    }

    // tables[i][j] = (outcome weights, per outcome: block weights)
    let tables: Vec<Vec<WeightTable>> = spec
        .states()
        .iter()
        .map(|comps| {
            comps
                .iter()
                .map(|c| {
                    let mut outcome_w = Vec::with_capacity(proto.alice.len());
                    let mut block_w = Vec::with_capacity(proto.alice.len());
                    for (kv, branch) in proto.alice.vectors.iter().zip(&proto.bob) {
                        let r = residual(&c.coefficients, kv, side);
                        let norm2 = r.norm_squared();
                        outcome_w.push(norm2);
                        let weights = branch
                            .blocks
                            .iter()
                            .map(|blk| blk.iter().map(|b| b.dotc(&r).norm_sqr()).sum::<f64>() / norm2.max(f64::MIN_POSITIVE))
                            .collect();
                        block_w.push(weights);
                    }
                    (outcome_w, block_w)
                })
                .collect()
        })
        .collect();
    let eig_w: Vec<Vec<f64>> = spec.states().iter().map(|c| c.iter().map(|x| x.eigenvalue).collect()).collect();

    let chunks = trials.div_ceil(SIMULATION_CHUNK as u64);
    for chunk in 0..chunks {
        let mut rng = random::rng_stream(seed, chunk);
        let start = chunk * SIMULATION_CHUNK as u64;
        let count = (trials - start).min(SIMULATION_CHUNK as u64);
        for _ in 0..count {
            let i = rng.random_range(0..n);
            let j = sample_index(&mut rng, &eig_w[i]).min(eig_w[i].len() - 1);
            let (outcome_w, block_w) = &tables[i][j];
            let k = sample_index(&mut rng, outcome_w).min(outcome_w.len() - 1);
            let block = sample_index(&mut rng, &block_w[k]);
            stats.per_outcome[k] += 1;
            stats.per_state[i].0 += 1;
            if block == i {
                stats.per_state[i].1 += 1;
                stats.successes += 1;
            }
        }
    }
    Ok(stats)
}
