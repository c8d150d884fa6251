//! Deciding whether `T⊥` contains a maximally abelian subspace.
//!
//! [`decide`] walks the dimension-indexed case analysis:
//!
//! 1. `dim T⊥ < d`: no one-way protocol at all.
//! 2. `dim T⊥ = d`: a MAS exists iff `T⊥` itself is abelian.
//! 3. `dim T⊥ >= d² - 2`: a MAS always exists, built by [`mas_from_small_t`].
//! 4. `dim T⊥ = d + 1`: the Γ/Ω rank test of [`gamma_decide`].
//! 5. otherwise only the commutator-dimension refutation of
//!    [`commutator_refutation`] is available.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::hermspace::{
    commutator_space, hs_inner, max_commutator_norm, simultaneous_diagonalize, EigenFrame, HermMatrix,
    SubspaceBasis, DEFAULT_RETRIES,
};
use crate::linalg;
use crate::tspace::TSpaces;
use crate::{Error, Result, Side, C64};

/// A singular value within this factor of the rank cutoff (either side) is
/// reported as ambiguous.
pub const RANK_AMBIGUITY_FACTOR: f64 = 1e3;

/// Residual at which the rotation-angle bisection stops.
pub const BISECTION_TOL: f64 = 1e-12;

/// Floor on the tolerance used to check zero diagonals after rotation.
pub const ZERO_DIAGONAL_FLOOR: f64 = 1e-9;

/// Which rule produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    /// `dim T⊥ < d`.
    TperpBelowD,
    /// `dim T⊥ = d` and `T⊥` is abelian, so it is the MAS.
    TperpIsMas,
    /// `dim T⊥ = d` and `T⊥` does not commute.
    TperpNotAbelian,
    /// `dim T <= 2`; a MAS comes from the zero-diagonal construction.
    SmallT,
    /// `dim T⊥ = d + 1` and the Γ/Ω structure yields a MAS.
    GammaRankTwo,
    /// `dim T⊥ = d + 1` and some Ω fails the rank-two test.
    GammaRankNotTwo,
    /// `dim T⊥ = d + 1` and the Ω supports share no direction.
    SupportIntersectionEmpty,
    /// The commutator space is larger than any MAS-containing `T⊥` allows.
    CommutatorTooLarge,
    /// `t` lies outside the range where the commutator bound is usable.
    OutsideCommutatorBound,
    /// The commutator space is small enough to be compatible with a MAS.
    CommutatorWithinBound,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::TperpBelowD => "tperp_dim_below_d",
            Reason::TperpIsMas => "tperp_is_mas",
            Reason::TperpNotAbelian => "tperp_dim_d_not_abelian",
            Reason::SmallT => "small_t_zero_diagonal",
            Reason::GammaRankTwo => "gamma_rank_two",
            Reason::GammaRankNotTwo => "gamma_rank_not_two",
            Reason::SupportIntersectionEmpty => "support_intersection_empty",
            Reason::CommutatorTooLarge => "commutator_space_too_large",
            Reason::OutsideCommutatorBound => "outside_commutator_bound",
            Reason::CommutatorWithinBound => "commutator_space_within_bound",
        }
    }
}

impl core::fmt::Display for Reason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    DistinguishableProjective { mas: SubspaceBasis, frame: EigenFrame },
    NotDistinguishable,
    NoProjectiveProtocol,
    Inconclusive,
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::DistinguishableProjective { .. } => "distinguishable_projective",
            Verdict::NotDistinguishable => "not_distinguishable",
            Verdict::NoProjectiveProtocol => "no_projective_protocol",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_distinguishable(&self) -> bool {
        matches!(self, Verdict::DistinguishableProjective { .. })
    }
}

/// Numbers behind a verdict. Fields that a branch never computes stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evidence {
    pub d: usize,
    pub dim_tperp: usize,
    /// `dim T⊥ - d` when positive.
    pub t: Option<usize>,
    pub max_commutator: Option<f64>,
    pub dim_commutator: Option<usize>,
    /// `t d + t (t - 3) / 2`.
    pub threshold: Option<i64>,
    /// `sqrt(3d² - 3d + 1/4) - (d - 3/2)`.
    pub t_bound: Option<f64>,
    pub omega_ranks: Vec<usize>,
    pub support_intersection_dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MasDecision {
    pub side: Side,
    pub dim_tperp: usize,
    pub verdict: Verdict,
    pub reason: Reason,
    pub evidence: Evidence,
}

/// Runs the case analysis on `ts`. `seed` drives simultaneous
/// diagonalization only, so the result is deterministic in its inputs.
pub fn decide(ts: &TSpaces, tol: f64, seed: u64) -> Result<MasDecision> {
    let d = ts.dim();
    let tperp = &ts.tperp;
    let dim = tperp.len();
    let mut evidence = Evidence { d, dim_tperp: dim, ..Evidence::default() };
    let out = |verdict, reason, evidence| MasDecision { side: ts.side, dim_tperp: dim, verdict, reason, evidence };

    if dim < d {
        return Ok(out(Verdict::NotDistinguishable, Reason::TperpBelowD, evidence));
    }
    if dim == d {
        let worst = max_commutator_norm(tperp);
        evidence.max_commutator = Some(worst);
        if worst <= tol {
            let frame = simultaneous_diagonalize(tperp, tol, DEFAULT_RETRIES, seed)?;
            let verdict = Verdict::DistinguishableProjective { mas: tperp.clone(), frame };
            return Ok(out(verdict, Reason::TperpIsMas, evidence));
        }
        return Ok(out(Verdict::NotDistinguishable, Reason::TperpNotAbelian, evidence));
    }
    let t = dim - d;
    evidence.t = Some(t);
    if dim + 2 >= d * d {
        let (mas, frame) = mas_from_small_t(&ts.t, tol)?;
        return Ok(out(Verdict::DistinguishableProjective { mas, frame }, Reason::SmallT, evidence));
    }

    let test = commutator_refutation(tperp, tol)?;
    evidence.dim_commutator = Some(test.dim_commutator);
    evidence.threshold = Some(test.threshold);
    evidence.t_bound = Some(test.t_bound);
    if test.refuted {
        return Ok(out(Verdict::NoProjectiveProtocol, Reason::CommutatorTooLarge, evidence));
    }
    if t == 1 {
        let outcome = gamma_decide(tperp, tol, seed)?;
        evidence.omega_ranks = outcome.analysis.omega_ranks.clone();
        evidence.support_intersection_dim = Some(outcome.analysis.support_intersection.len());
        return Ok(match outcome.mas {
            Some((mas, frame)) => {
                out(Verdict::DistinguishableProjective { mas, frame }, Reason::GammaRankTwo, evidence)
            }
            None => out(Verdict::NoProjectiveProtocol, outcome.reason, evidence),
        });
    }
    let reason = if test.within_bound { Reason::CommutatorWithinBound } else { Reason::OutsideCommutatorBound };
    Ok(out(Verdict::Inconclusive, reason, evidence))
}

/// Outcome of the commutator-dimension test.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorTest {
    pub t: usize,
    pub dim_commutator: usize,
    pub threshold: i64,
    pub t_bound: f64,
    pub within_bound: bool,
    /// `T⊥` provably contains no MAS.
    pub refuted: bool,
}

/// Upper end of the `t` range in which the commutator bound applies.
pub fn commutator_t_bound(d: usize) -> f64 {
    let d = d as f64;
    libm::sqrt(3.0 * d * d - 3.0 * d + 0.25) - (d - 1.5)
}

/// A `T⊥` of dimension `d + t` that contains a MAS has
/// `dim span{i[T_j, T_k]} <= t d + t (t - 3) / 2`; for `t` inside
/// [`commutator_t_bound`] exceeding this refutes the MAS.
pub fn commutator_refutation(tperp: &SubspaceBasis, tol: f64) -> Result<CommutatorTest> {
    let d = tperp.dim_ambient();
    if tperp.len() <= d {
        return Err(Error::InvalidParameter(alloc::format!(
            "commutator test needs dim T⊥ > d, got {} with d = {d}",
            tperp.len()
        )));
    }
    let t = tperp.len() - d;
    let ti = t as i64;
    let threshold = ti * d as i64 + ti * (ti - 3) / 2;
    let t_bound = commutator_t_bound(d);
    let within_bound = (t as f64) <= t_bound;
    let c = commutator_space(&tperp.with_tol(tol))?;
    let dim_commutator = c.len();
    let refuted = within_bound && (dim_commutator as i64) > threshold;
    Ok(CommutatorTest { t, dim_commutator, threshold, t_bound, within_bound, refuted })
}

/// Γ/Ω data of a `(d + 1)`-dimensional `T⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaAnalysis {
    pub t: usize,
    /// Orthonormal basis `{G_j}` of the commutator space.
    pub commutator: SubspaceBasis,
    /// `(Γ_j)_{kl} = i Tr(G_j [T_k, T_l])`.
    pub gamma: Vec<DMatrix<f64>>,
    /// Frobenius-orthonormal basis of `span{Γ_j}`.
    pub omega: Vec<DMatrix<f64>>,
    pub omega_ranks: Vec<usize>,
    /// Orthonormal basis of the intersection of the Ω supports.
    pub support_intersection: Vec<DVector<f64>>,
}

/// Builds Γ and Ω. Fails with [`Error::RankAmbiguity`] when a singular
/// value of some Ω sits within [`RANK_AMBIGUITY_FACTOR`] of its cutoff.
pub fn gamma_analysis(tperp: &SubspaceBasis, tol: f64) -> Result<GammaAnalysis> {
    let d = tperp.dim_ambient();
    let n = tperp.len();
    let els = tperp.elements();
    let commutator = commutator_space(&tperp.with_tol(tol))?;
    let mut brackets = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            brackets.push(els[k].commutator_i(&els[l]));
        }
    }
    let mut gamma = Vec::with_capacity(commutator.len());
    for g in commutator.elements() {
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                m[(k, l)] = hs_inner(g, &brackets[k * n + l])?;
            }
        }
        gamma.push(m);
    }
    let omega = gram_schmidt_matrices(&gamma, tol);

    let mut omega_ranks = Vec::with_capacity(omega.len());
    let mut supports = Vec::with_capacity(omega.len());
    for (idx, w) in omega.iter().enumerate() {
        let svd = w.clone().svd(true, false);
        let u = svd.u.expect("u requested");
        let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let cutoff = tol * max;
        for &s in &sv {
            if s > cutoff / RANK_AMBIGUITY_FACTOR && s <= cutoff * RANK_AMBIGUITY_FACTOR {
                return Err(Error::RankAmbiguity { matrix: idx, singular_value: s, cutoff });
            }
        }
        let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > cutoff).collect();
        omega_ranks.push(keep.len());
        let mut p = DMatrix::<f64>::zeros(n, n);
        for &k in &keep {
            let col = u.column(k);
            p += col * col.transpose();
        }
        supports.push(p);
    }

    // vectors annihilated by every (1 - P_j)
    let support_intersection = if supports.is_empty() {
        Vec::new()
    } else {
        let mut acc = DMatrix::<f64>::zeros(n, n);
        for p in &supports {
            acc += DMatrix::<f64>::identity(n, n) - p;
        }
        let (values, vectors) = linalg::sym_eigen_sorted(acc);
        (0..n)
            .filter(|&k| values[k] <= tol.max(f64::EPSILON * n as f64 * 16.0))
            .map(|k| {
                let mut v: DVector<f64> = vectors.column(k).into_owned();
                linalg::canonical_sign(&mut v);
                v
            })
            .collect()
    };
    Ok(GammaAnalysis { t: n - d, commutator, gamma, omega, omega_ranks, support_intersection })
}

fn gram_schmidt_matrices(ms: &[DMatrix<f64>], tol: f64) -> Vec<DMatrix<f64>> {
    let scale = ms.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let mut out: Vec<DMatrix<f64>> = Vec::new();
    if scale <= tol {
        return out;
    }
    for m in ms {
        let mut r = m.clone();
        for q in &out {
            let c = r.dot(q);
            r -= q * c;
        }
        let norm = r.norm();
        if norm > tol * scale {
            out.push(r / norm);
        }
    }
    out
}

/// Result of [`gamma_decide`].
#[derive(Clone, Debug, PartialEq)]
pub struct GammaOutcome {
    pub analysis: GammaAnalysis,
    /// The MAS and its eigenframe, when one exists.
    pub mas: Option<(SubspaceBasis, EigenFrame)>,
    pub reason: Reason,
}

/// Exact test for `dim T⊥ = d + 1`: a MAS exists iff every Ω has rank two
/// and their supports share a direction `e_{d+1}`. The MAS is then spanned by
/// `T'_k = Σ_l O_kl T_l`, `k <= d`, where the rows of `O` are the
/// `e_j = -Ω_j e_{d+1}`, an orthonormal completion, and `e_{d+1}` last.
///
/// With a single Ω the intersection is its whole two-dimensional support and
/// any direction in it works; the first basis vector is taken.
pub fn gamma_decide(tperp: &SubspaceBasis, tol: f64, seed: u64) -> Result<GammaOutcome> {
    let d = tperp.dim_ambient();
    let n = tperp.len();
    if n != d + 1 {
        return Err(Error::InvalidParameter(alloc::format!(
            "Γ analysis needs dim T⊥ = d + 1 = {}, got {n}",
            d + 1
        )));
    }
    let analysis = gamma_analysis(tperp, tol)?;

    if analysis.omega.is_empty() {
        // an abelian family of d + 1 hermitian d × d matrices cannot be
        // linearly independent, so this only happens through roundoff
        let frame = simultaneous_diagonalize(&tperp.with_tol(tol), tol, DEFAULT_RETRIES, seed)?;
        let mas = projector_span(&frame, tol)?;
        for p in mas.elements() {
            if !tperp.contains(p, libm::sqrt(tol)) {
                return Err(Error::InternalConsistency(String::from(
                    "abelian T⊥ whose eigenprojectors leave T⊥",
                )));
            }
        }
        return Ok(GammaOutcome { analysis, mas: Some((mas, frame)), reason: Reason::GammaRankTwo });
    }
    if analysis.omega_ranks.iter().any(|&r| r != 2) {
        return Ok(GammaOutcome { analysis, mas: None, reason: Reason::GammaRankNotTwo });
    }
    let inter = analysis.support_intersection.len();
    let accepted = inter == 1 || (inter == 2 && analysis.omega.len() == 1);
    if !accepted {
        return Ok(GammaOutcome { analysis, mas: None, reason: Reason::SupportIntersectionEmpty });
    }

    let last = analysis.support_intersection[0].clone();
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(n);
    for w in &analysis.omega {
        let mut e = -(w * &last);
        for q in rows.iter().chain(core::iter::once(&last)) {
            let c = e.dot(q);
            e -= q * c;
        }
        let norm = e.norm();
        if norm <= tol {
            return Err(Error::InternalConsistency(String::from("Ω annihilates the common support vector")));
        }
        e /= norm;
        linalg::canonical_sign(&mut e);
        rows.push(e);
    }
    let mut known = DMatrix::zeros(rows.len() + 1, n);
    for (r, e) in rows.iter().chain(core::iter::once(&last)).enumerate() {
        known.set_row(r, &e.transpose());
    }
    let completion = linalg::real_complement(&known, n);
    for r in 0..completion.nrows() {
        rows.push(completion.row(r).transpose());
    }
    rows.push(last);

    let primed: Vec<HermMatrix> = rows
        .iter()
        .take(d)
        .map(|row| tperp.combine(row.as_slice()))
        .collect();
    let mas = SubspaceBasis::from_orthonormal(d, primed, tol)?;
    let worst = max_commutator_norm(&mas);
    if worst > tol {
        return Err(Error::InternalConsistency(alloc::format!(
            "constructed subspace is not abelian (commutator {worst:e})"
        )));
    }
    let frame = simultaneous_diagonalize(&mas, tol, DEFAULT_RETRIES, seed)?;
    Ok(GammaOutcome { analysis, mas: Some((mas, frame)), reason: Reason::GammaRankTwo })
}

/// The span of the rank-one projectors of a frame.
fn projector_span(frame: &EigenFrame, tol: f64) -> Result<SubspaceBasis> {
    SubspaceBasis::from_orthonormal(frame.dim(), frame.projectors(), tol.max(1e-12))
}

/// MAS for `dim T <= 2`: zero the diagonals of (up to) two basis elements of
/// `T` with one unitary; its columns are the frame, and their projectors,
/// being orthogonal to `T`, span a MAS inside `T⊥`.
pub fn mas_from_small_t(t: &SubspaceBasis, tol: f64) -> Result<(SubspaceBasis, EigenFrame)> {
    let d = t.dim_ambient();
    if t.len() > 2 {
        return Err(Error::InvalidParameter(alloc::format!("dim T must be at most 2, got {}", t.len())));
    }
    let h = t.elements().first().cloned().unwrap_or_else(|| HermMatrix::zeros(d));
    let a = t.elements().get(1).cloned().unwrap_or_else(|| HermMatrix::zeros(d));
    let u = zero_diagonal_pair(&h, &a, tol)?;
    let frame = EigenFrame::from_unitary(u, tol.max(ZERO_DIAGONAL_FLOOR))?;
    let mas = projector_span(&frame, tol.max(ZERO_DIAGONAL_FLOOR))?;
    let check = tol.max(ZERO_DIAGONAL_FLOOR);
    for p in mas.elements() {
        for x in t.elements() {
            let overlap = hs_inner(p, x)?.abs();
            if overlap > check {
                return Err(Error::InternalConsistency(alloc::format!(
                    "frame projector overlaps T by {overlap:e}"
                )));
            }
        }
    }
    Ok((mas, frame))
}

/// Unitary `U` such that `U^† H U` and `U^† A U` both have zero diagonal.
///
/// `H` and `A` must be traceless (relative to their norm, within `tol`).
pub fn zero_diagonal_pair(h: &HermMatrix, a: &HermMatrix, tol: f64) -> Result<DMatrix<C64>> {
    if h.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: a.dim() });
    }
    for x in [h, a] {
        let trace = x.trace();
        if trace.abs() > tol * x.hs_norm().max(1.0) {
            return Err(Error::NonTraceless { trace });
        }
    }
    if h.dim() == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    Ok(zero_diagonal_step(h.as_matrix(), a.as_matrix()))
}

fn remove_trace(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let tr = m.trace() / C64::new(n as f64, 0.0);
    let mut out = (m + m.adjoint()) * C64::new(0.5, 0.0);
    for k in 0..n {
        out[(k, k)] -= tr;
    }
    out
}

fn embed_upper(block: &DMatrix<C64>) -> DMatrix<C64> {
    let m = block.nrows();
    let mut out = DMatrix::<C64>::identity(m + 1, m + 1);
    out.view_mut((0, 0), (m, m)).copy_from(block);
    out
}

fn zero_diagonal_step(h: &DMatrix<C64>, a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = h.nrows();
    if n == 1 {
        return DMatrix::identity(1, 1);
    }
    let h = remove_trace(h);
    let a = remove_trace(a);
    let m = n - 1;
    let v = embed_upper(&zero_diagonal_step(
        &h.view((0, 0), (m, m)).into_owned(),
        &a.view((0, 0), (m, m)).into_owned(),
    ));
    let h1 = v.adjoint() * &h * &v;
    let a1 = v.adjoint() * &a * &v;

    // components along diag(1, .., 1, -m) / sqrt(m (m + 1))
    let s = libm::sqrt((m * (m + 1)) as f64);
    let component = |x: &DMatrix<C64>| {
        let mut acc = 0.0;
        for k in 0..m {
            acc += x[(k, k)].re;
        }
        (acc - m as f64 * x[(m, m)].re) / s
    };
    let alpha = component(&h1);
    let beta = component(&a1);
    let r = libm::hypot(alpha, beta);
    let scale = h.norm().max(a.norm()).max(1.0);
    if r <= 1e-14 * scale {
        return v;
    }
    let re = |x: f64| C64::new(x, 0.0);
    // diagonal (1, .., 1, -m)
    let hp = (&h1 * re(alpha) + &a1 * re(beta)) * re(s / (r * r));
    let ap = (&h1 * re(-beta) + &a1 * re(alpha)) * re(1.0 / r);

    let (p, q) = (m - 1, m);
    let phi = -ap[(p, q)].arg();
    let omega = (PI + 2.0 * phi) / 4.0;
    let mut du = DMatrix::<C64>::identity(n, n);
    du[(p, p)] = C64::from_polar(1.0, -omega);
    du[(q, q)] = C64::from_polar(1.0, omega);
    let h2 = du.adjoint() * &hp * &du;
    let a2 = du.adjoint() * &ap * &du;

    let hh = h2[(p, q)].re;
    let mf = m as f64;
    let f = |theta: f64| (1.0 - mf) / 2.0 - (1.0 + mf) / 2.0 * libm::cos(theta) - hh * libm::sin(theta);
    let (mut lo, mut hi) = (0.0, PI);
    let mut theta = PI / 2.0;
    for _ in 0..200 {
        theta = 0.5 * (lo + hi);
        let val = f(theta);
        if val.abs() <= BISECTION_TOL {
            break;
        }
        if val < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
    }
    let (c, sn) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
    let mut rot = DMatrix::<C64>::identity(n, n);
    rot[(p, p)] = re(c);
    rot[(p, q)] = re(-sn);
    rot[(q, p)] = re(sn);
    rot[(q, q)] = re(c);
    let h3 = rot.adjoint() * &h2 * &rot;
    let a3 = rot.adjoint() * &a2 * &rot;

    let w = embed_upper(&zero_diagonal_step(
        &h3.view((0, 0), (m, m)).into_owned(),
        &a3.view((0, 0), (m, m)).into_owned(),
    ));
    v * du * rot * w
}

/// `max_k |(U^† X U)_kk|`.
pub fn max_rotated_diagonal(u: &DMatrix<C64>, x: &HermMatrix) -> f64 {
    let m = u.adjoint() * x.as_matrix() * u;
    m.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `true` when every frame projector lies in `tperp` within `tol`.
pub fn frame_in_span(frame: &EigenFrame, tperp: &SubspaceBasis, tol: f64) -> bool {
    frame.projectors().iter().all(|p| tperp.contains(p, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermspace::{complement, is_abelian, orthonormalize};
    use crate::random::{self, random_traceless};
    use crate::states::{bell_family, gen_bell_coefficients, spectral_decompose};
    use crate::tspace::{build_pair_operators, build_tspaces};
    use alloc::vec;

    const TOL: f64 = 1e-10;

    fn tspaces(d: usize, idx: &[(usize, usize)], side: Side) -> TSpaces {
        let set = bell_family(d, idx, TOL).unwrap();
        let spec = spectral_decompose(&set, TOL).unwrap();
        build_tspaces(&build_pair_operators(&spec, side), TOL).unwrap()
    }

    fn herm(m: DMatrix<C64>) -> HermMatrix {
        HermMatrix::new(m).unwrap()
    }

    fn listed_example_two() -> SubspaceBasis {
        let w = |n, m| gen_bell_coefficients(n, m, 4).unwrap();
        let listed = [
            HermMatrix::identity(4),
            herm(w(0, 2)),
            herm((w(2, 1) - w(2, 3)) * C64::new(0.5, 0.0)),
            herm((w(2, 1) + w(2, 3)) * C64::new(0.0, -0.5)),
            herm(w(2, 0)),
        ];
        // the listed matrices are mutually orthogonal; normalize in order
        let els = listed.iter().map(|x| x.scale(1.0 / x.hs_norm())).collect();
        SubspaceBasis::from_orthonormal(4, els, TOL).unwrap()
    }

    /// Frames agree up to phases and a permutation of the vectors.
    fn frame_matches(frame: &EigenFrame, expected: &[DVector<C64>], tol: f64) -> bool {
        expected.iter().all(|e| {
            frame.vectors().iter().any(|v| (v.dotc(e).norm() - 1.0).abs() <= tol)
        })
    }

    fn real(v: &[f64]) -> DVector<C64> {
        DVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)))
    }

    #[test]
    fn zero_pair_gives_identity() {
        let z = HermMatrix::zeros(3);
        let u = zero_diagonal_pair(&z, &z, TOL).unwrap();
        assert_eq!(u, DMatrix::identity(3, 3));
    }

    #[test]
    fn zero_diagonal_sigma_z() {
        let sz = HermMatrix::from_real_diagonal(&[1.0, -1.0]);
        let u = zero_diagonal_pair(&sz, &HermMatrix::zeros(2), TOL).unwrap();
        assert!(linalg::unitarity_defect(&u) < 1e-12);
        assert!(max_rotated_diagonal(&u, &sz) < 1e-11);
    }

    #[test]
    fn zero_diagonal_random_pairs() {
        let mut rng = random::rng(11);
        for d in 2..=6 {
            for _ in 0..10 {
                let h = random_traceless(&mut rng, d);
                let a = random_traceless(&mut rng, d);
                let u = zero_diagonal_pair(&h, &a, TOL).unwrap();
                assert!(linalg::unitarity_defect(&u) < 1e-10);
                assert!(max_rotated_diagonal(&u, &h) < 1e-9);
                assert!(max_rotated_diagonal(&u, &a) < 1e-9);
            }
        }
    }

    #[test]
    fn zero_diagonal_rejects_trace() {
        let h = HermMatrix::identity(2);
        let err = zero_diagonal_pair(&h, &HermMatrix::zeros(2), TOL).unwrap_err();
        assert!(matches!(err, Error::NonTraceless { .. }));
    }

    #[test]
    fn example_one_is_mas() {
        let ts = tspaces(4, &[(0, 0), (0, 1), (1, 0), (3, 3)], Side::A);
        let dec = decide(&ts, TOL, 0).unwrap();
        assert_eq!(dec.reason, Reason::TperpIsMas);
        let Verdict::DistinguishableProjective { frame, .. } = &dec.verdict else {
            panic!("expected a MAS, got {:?}", dec.verdict.tag());
        };
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let expected = [
            real(&[h, 0.0, h, 0.0]),
            real(&[h, 0.0, -h, 0.0]),
            real(&[0.0, h, 0.0, h]),
            real(&[0.0, h, 0.0, -h]),
        ];
        assert!(frame_matches(frame, &expected, 1e-9));
        assert!(frame_in_span(frame, &ts.tperp, 1e-9));
    }

    #[test]
    fn bell_basis_is_refuted() {
        for side in Side::BOTH {
            let ts = tspaces(2, &[(0, 0), (0, 1), (1, 0), (1, 1)], side);
            let dec = decide(&ts, TOL, 0).unwrap();
            assert_eq!(dec.verdict, Verdict::NotDistinguishable);
            assert_eq!(dec.reason, Reason::TperpBelowD);
        }
    }

    #[test]
    fn two_bell_states_use_small_t() {
        let ts = tspaces(2, &[(0, 0), (0, 1)], Side::A);
        assert_eq!(ts.tperp.len(), 3);
        let dec = decide(&ts, TOL, 0).unwrap();
        assert_eq!(dec.reason, Reason::SmallT);
        let Verdict::DistinguishableProjective { frame, mas } = &dec.verdict else { panic!() };
        assert!(frame_in_span(frame, &ts.tperp, 1e-9));
        assert!(is_abelian(mas, 1e-9));
    }

    #[test]
    fn listed_example_two_gamma_structure() {
        let tperp = listed_example_two();
        let test = commutator_refutation(&tperp, TOL).unwrap();
        assert_eq!((test.t, test.dim_commutator, test.threshold), (1, 2, 3));
        assert!(!test.refuted);

        let out = gamma_decide(&tperp, TOL, 0).unwrap();
        let an = &out.analysis;
        assert_eq!(an.omega_ranks, vec![2, 2]);
        for g in &an.gamma {
            assert!((g + g.transpose()).norm() < 1e-12);
        }
        // span{Ω} = span{E35 - E53, E45 - E54}
        let mut g1 = DMatrix::<f64>::zeros(5, 5);
        g1[(2, 4)] = 1.0;
        g1[(4, 2)] = -1.0;
        let mut g2 = DMatrix::<f64>::zeros(5, 5);
        g2[(3, 4)] = 1.0;
        g2[(4, 3)] = -1.0;
        for w in &an.omega {
            let proj = w.dot(&g1) / 2.0 * &g1 + w.dot(&g2) / 2.0 * &g2;
            assert!((w - proj).norm() < 1e-9);
        }
        assert_eq!(an.support_intersection.len(), 1);
        let e = &an.support_intersection[0];
        assert!((e[4] - 1.0).abs() < 1e-9 && e.rows(0, 4).norm() < 1e-9);

        let (mas, frame) = out.mas.expect("MAS");
        assert!(is_abelian(&mas, 1e-9));
        let span14 = SubspaceBasis::from_orthonormal(4, tperp.elements()[..4].to_vec(), TOL).unwrap();
        assert!(mas.spans_same(&span14, 1e-9));
        // eigenvectors of W21: two real Hadamard rows and (1, ±i, 1, ±i) / 2
        let c = |re: f64, im: f64| C64::new(re, im);
        let expected = [
            real(&[0.5, 0.5, -0.5, -0.5]),
            real(&[0.5, -0.5, -0.5, 0.5]),
            DVector::from_vec(vec![c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.5)]),
            DVector::from_vec(vec![c(0.5, 0.0), c(0.0, -0.5), c(0.5, 0.0), c(0.0, -0.5)]),
        ];
        assert!(frame_matches(&frame, &expected, 1e-9));
        // the all-ones vector is not an eigenvector of the fourth basis element
        let ones = real(&[0.5, 0.5, 0.5, 0.5]);
        let t4 = tperp.elements()[3].as_matrix();
        let image = t4 * &ones;
        assert!((&image - &ones * ones.dotc(&image)).norm() > 0.1);
    }

    #[test]
    fn example_two_fixture_lands_beyond_gamma_test() {
        // dim T⊥ is 7 here, not d + 1
        let ts = tspaces(4, &[(0, 0), (0, 1), (1, 2), (3, 0)], Side::A);
        let dec = decide(&ts, TOL, 0).unwrap();
        assert_eq!(dec.evidence.t, Some(3));
        assert_eq!(dec.verdict, Verdict::Inconclusive);
        assert!(listed_example_two().elements().iter().all(|x| ts.tperp.contains(x, 1e-9)));
    }

    #[test]
    fn diagonals_plus_sigma_x_block() {
        let mut sx = DMatrix::<C64>::zeros(3, 3);
        sx[(0, 1)] = C64::new(1.0, 0.0);
        sx[(1, 0)] = C64::new(1.0, 0.0);
        let mut gens = crate::hermspace::standard_basis(3)[..3].to_vec();
        gens.push(herm(sx));
        let tperp = orthonormalize(3, &gens, TOL).unwrap();
        let out = gamma_decide(&tperp, TOL, 0).unwrap();
        assert_eq!(out.analysis.commutator.len(), 1);
        assert_eq!(out.analysis.omega_ranks, vec![2]);
        let (mas, frame) = out.mas.expect("a MAS exists: diag(a, a, b) ⊕ σx block");
        assert!(is_abelian(&mas, 1e-9));
        assert!(frame_in_span(&frame, &tperp, 1e-9));
    }

    #[test]
    fn random_subspace_with_identity_is_refuted() {
        let mut rng = random::rng(2024);
        let mut gens = vec![HermMatrix::identity(4)];
        for _ in 0..4 {
            gens.push(random::random_hermitian(&mut rng, 4));
        }
        let tperp = orthonormalize(4, &gens, TOL).unwrap();
        assert_eq!(tperp.len(), 5);
        let test = commutator_refutation(&tperp, TOL).unwrap();
        assert!(test.dim_commutator > 3);
        assert!(test.refuted);
        let out = gamma_decide(&tperp, TOL, 0).unwrap();
        assert!(out.mas.is_none());
    }

    #[test]
    fn abelian_plus_one_is_never_refuted() {
        let mut rng = random::rng(8);
        for d in 3..=5 {
            let u = random::haar_unitary(&mut rng, d);
            let mut gens: Vec<HermMatrix> = (0..d)
                .map(|k| HermMatrix::projector(&u.column(k).into_owned()))
                .collect();
            gens.push(random::random_hermitian(&mut rng, d));
            let tperp = orthonormalize(d, &gens, TOL).unwrap();
            let test = commutator_refutation(&tperp, TOL).unwrap();
            assert!(!test.refuted, "d = {d}: {test:?}");
            let out = gamma_decide(&tperp, TOL, 1).unwrap();
            let (mas, frame) = out.mas.expect("MAS");
            assert!(frame_in_span(&frame, &tperp, 1e-8));
            assert_eq!(mas.len(), d);
        }
    }

    #[test]
    fn decide_is_deterministic() {
        let ts = tspaces(3, &[(0, 1), (1, 1)], Side::B);
        assert_eq!(decide(&ts, TOL, 5).unwrap(), decide(&ts, TOL, 5).unwrap());
    }

    #[test]
    fn complement_of_small_t_contains_frame() {
        let mut rng = random::rng(4);
        let t = orthonormalize(3, &[random_traceless(&mut rng, 3), random_traceless(&mut rng, 3)], TOL).unwrap();
        let (_, frame) = mas_from_small_t(&t, TOL).unwrap();
        assert!(frame_in_span(&frame, &complement(&t), 1e-9));
    }
}
