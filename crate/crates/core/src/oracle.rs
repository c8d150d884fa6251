//! Randomized checks that are independent of the decision procedure.
//!
//! [`random_feasible_frame_search`] looks for an orthonormal frame whose
//! vectors satisfy `<v|W_𝐢|v> = 0` for every pair operator by a damped
//! Gauss–Newton (Levenberg–Marquardt) descent over the unitary group from
//! Haar-random starting points. A `None` result is evidence, not proof.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::hermspace::{EigenFrame, HermMatrix};
use crate::random;
use crate::states::spectral_from_pure;
use crate::tspace::{build_pair_operators, build_tspaces, PairOperators};
use crate::{Error, Result, Side, C64, DEFAULT_TOL};

/// Iterations of the local search per restart.
pub const MAX_ITERATIONS: usize = 300;

/// Residuals of the frame `u`: the diagonal entries of `U^† X U`.
fn residuals(u: &DMatrix<C64>, gens: &[DMatrix<C64>]) -> (DVector<f64>, Vec<DMatrix<C64>>) {
    let d = u.ncols();
    let mut r = DVector::zeros(gens.len() * d);
    let mut rotated = Vec::with_capacity(gens.len());
    for (g, x) in gens.iter().enumerate() {
        let xr = u.adjoint() * x * u;
        for k in 0..d {
            r[g * d + k] = xr[(k, k)].re;
        }
        rotated.push(xr);
    }
    (r, rotated)
}

/// Basis of antihermitian `d × d` matrices with zero diagonal (the diagonal
/// directions only change phases and leave the residuals fixed).
fn antihermitian_basis(d: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(d * (d - 1));
    for k in 0..d {
        for l in (k + 1)..d {
            let mut re = DMatrix::zeros(d, d);
            re[(k, l)] = C64::new(1.0, 0.0);
            re[(l, k)] = C64::new(-1.0, 0.0);
            out.push(re);
            let mut im = DMatrix::zeros(d, d);
            im[(k, l)] = C64::new(0.0, 1.0);
            im[(l, k)] = C64::new(0.0, 1.0);
            out.push(im);
        }
    }
    out
}

/// `U (1 - K/2)^{-1} (1 + K/2)`, unitary for antihermitian `K`.
fn cayley_step(u: &DMatrix<C64>, k: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let d = k.nrows();
    let half = k * C64::new(0.5, 0.0);
    let id = DMatrix::<C64>::identity(d, d);
    let inv = (&id - &half).try_inverse()?;
    Some(u * inv * (id + half))
}

fn max_abs(r: &DVector<f64>) -> f64 {
    r.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Seeded restarts of a local search for a feasible frame. Restart `a` starts
/// from a Haar unitary drawn from stream `a` of `seed`. Returns the first
/// frame whose largest residual `|<v_k|W_𝐢|v_k>|` is at most `tol`.
pub fn random_feasible_frame_search(ops: &PairOperators, attempts: usize, seed: u64, tol: f64) -> Option<EigenFrame> {
    let d = ops.dim();
    let gens: Vec<DMatrix<C64>> = ops.hermitian_generators().into_iter().map(HermMatrix::into_inner).collect();
    if gens.is_empty() || d == 1 {
        return Some(EigenFrame::standard(d));
    }
    let basis = antihermitian_basis(d);
    let accept = |u: &DMatrix<C64>| {
        let frame = EigenFrame::from_unitary(u.clone(), 1e-9).ok()?;
        let worst = frame
            .vectors()
            .iter()
            .flat_map(|v| ops.operators().iter().map(move |o| v.dotc(&(&o.w * v)).norm()))
            .fold(0.0, f64::max);
        (worst <= tol).then_some(frame)
    };
    for attempt in 0..attempts {
        let mut rng = random::rng_stream(seed, attempt as u64);
        let mut u = random::haar_unitary(&mut rng, d);
        let (mut r, mut rotated) = residuals(&u, &gens);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..MAX_ITERATIONS {
            if max_abs(&r) <= tol * 0.1 {
                break;
            }
            // d/dε diag(e^{-εK} X' e^{εK}) = diag([X', K])
            let mut jac = DMatrix::<f64>::zeros(r.len(), basis.len());
            for (p, kp) in basis.iter().enumerate() {
                for (g, xr) in rotated.iter().enumerate() {
                    let comm = xr * kp - kp * xr;
                    for k in 0..d {
                        jac[(g * d + k, p)] = comm[(k, k)].re;
                    }
                }
            }
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            if grad.norm() <= 1e-15 {
                break;
            }
            let mut improved = false;
            for _ in 0..12 {
                let mut lhs = jtj.clone();
                let scale = jtj.diagonal().iter().cloned().fold(0.0, f64::max).max(1e-12);
                for i in 0..lhs.nrows() {
                    lhs[(i, i)] += mu * scale;
                }
                let Some(delta) = lhs.cholesky().map(|c| c.solve(&(-&grad))) else {
                    mu *= 10.0;
                    continue;
                };
                let mut kmat = DMatrix::<C64>::zeros(d, d);
                for (c, kp) in delta.iter().zip(&basis) {
                    kmat += kp * C64::new(*c, 0.0);
                }
                let Some(candidate) = cayley_step(&u, &kmat) else {
                    mu *= 10.0;
                    continue;
                };
                let (rc, rotc) = residuals(&candidate, &gens);
                let cc = rc.norm_squared();
                if cc < cost {
                    u = candidate;
                    r = rc;
                    rotated = rotc;
                    cost = cc;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        if let Some(frame) = accept(&u) {
            return Some(frame);
        }
    }
    None
}

/// Distribution of `dim T⊥` over Haar-random pure families.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericityReport {
    pub d: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub dim_histogram: BTreeMap<usize, usize>,
    /// `Det(M Mᵀ)` with `M` the stacked coordinates of all `H_𝐢`, `A_𝐢`.
    pub det_diagnostics: Option<Vec<f64>>,
}

/// Draws `samples` families of `n` orthonormal states in `C^{d²}` (sample
/// `s` from stream `s` of `seed`), computes `dim T⊥` for side A of each and
/// histograms the result.
pub fn genericity_sample(d: usize, n: usize, samples: usize, seed: u64, with_det: bool) -> Result<GenericityReport> {
    if d == 0 || n == 0 || n > d * d {
        return Err(Error::InvalidParameter(alloc::format!("need 1 <= n <= d², got d = {d}, n = {n}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from("samples must be at least 1")));
    }
    let mut dim_histogram = BTreeMap::new();
    let mut dets = Vec::new();
    for s in 0..samples {
        let mut rng = random::rng_stream(seed, s as u64);
        let family = random::haar_orthonormal_family(&mut rng, d * d, n);
        let spec = spectral_from_pure(d, &family);
        let ops = build_pair_operators(&spec, Side::A);
        let ts = build_tspaces(&ops, DEFAULT_TOL)?;
        *dim_histogram.entry(ts.tperp.len()).or_insert(0) += 1;
        if with_det {
            let gens = ops.hermitian_generators();
            let mut m = DMatrix::<f64>::zeros(gens.len(), d * d);
            for (r, g) in gens.iter().enumerate() {
                m.set_row(r, &g.to_coords().transpose());
            }
            dets.push((&m * m.transpose()).determinant());
        }
    }
    Ok(GenericityReport {
        d,
        n,
        samples,
        seed,
        dim_histogram,
        det_diagnostics: with_det.then_some(dets),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{alice_from_frame, verify_op};
    use crate::states::{bell_family, spectral_decompose};

    const TOL: f64 = 1e-10;

    fn ops(d: usize, idx: &[(usize, usize)]) -> (crate::states::SpectralStateSet, PairOperators) {
        let set = bell_family(d, idx, TOL).unwrap();
        let spec = spectral_decompose(&set, TOL).unwrap();
        let ops = build_pair_operators(&spec, Side::A);
        (spec, ops)
    }

    #[test]
    fn finds_example_one_frame() {
        let (spec, ops) = ops(4, &[(0, 0), (0, 1), (1, 0), (3, 3)]);
        let frame = random_feasible_frame_search(&ops, 64, 0, TOL).expect("frame");
        let alice = alice_from_frame(&frame, Side::A);
        assert!(verify_op(&spec, &alice).max_violation <= TOL);
    }

    #[test]
    fn bell_basis_has_no_frame() {
        let (_, ops) = ops(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(random_feasible_frame_search(&ops, 16, 0, TOL).is_none());
    }

    #[test]
    fn single_state_is_immediate() {
        let (_, ops) = ops(3, &[(2, 1)]);
        assert_eq!(random_feasible_frame_search(&ops, 1, 0, TOL), Some(EigenFrame::standard(3)));
    }

    #[test]
    fn genericity_small_cases() {
        let r = genericity_sample(2, 4, 20, 1, false).unwrap();
        assert_eq!(r.dim_histogram.get(&1), Some(&20));
        let r = genericity_sample(2, 1, 5, 1, true).unwrap();
        assert_eq!(r.dim_histogram.get(&4), Some(&5));
        assert_eq!(r.det_diagnostics.as_ref().map(|v| v.len()), Some(5));
        assert_eq!(genericity_sample(3, 3, 10, 7, false).unwrap(), genericity_sample(3, 3, 10, 7, false).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(genericity_sample(2, 5, 1, 0, false).is_err());
        assert!(genericity_sample(2, 1, 0, 0, false).is_err());
    }
}
