//! Seeded random matrices and state families.
//!
//! All generators take an explicit `ChaCha8Rng` so results are reproducible
//! across platforms.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hermspace::HermMatrix;
use crate::states::{StateEntry, StateSet};
use crate::{Result, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sub-stream `stream` of the generator seeded by `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

/// Haar-distributed `n × n` unitary: QR of a Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// First `n` columns of a Haar unitary on `C^dim`.
pub fn haar_orthonormal_family(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<DVector<C64>> {
    let u = haar_unitary(rng, dim);
    (0..n).map(|k| u.column(k).into_owned()).collect()
}

/// Hermitian matrix from the Gaussian unitary ensemble (unit-scale entries).
pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> HermMatrix {
    HermMatrix::hermitian_part(&gaussian_matrix(rng, d, d))
}

/// Random traceless hermitian matrix with unit Hilbert–Schmidt norm.
pub fn random_traceless(rng: &mut ChaCha8Rng, d: usize) -> HermMatrix {
    let h = random_hermitian(rng, d);
    let shift = h.trace() / d as f64;
    let mut m = h.into_inner();
    for k in 0..d {
        m[(k, k)] -= C64::new(shift, 0.0);
    }
    let h = HermMatrix::hermitian_part(&m);
    let norm = h.hs_norm();
    if norm > 0.0 {
        h.scale(1.0 / norm)
    } else {
        h
    }
}

/// `n` Haar-random orthonormal pure states on `d_a ⊗ d_b`.
pub fn random_pure_set(rng: &mut ChaCha8Rng, d_a: usize, d_b: usize, n: usize, tol: f64) -> Result<StateSet> {
    let states = haar_orthonormal_family(rng, d_a * d_b, n).into_iter().map(StateEntry::Pure).collect();
    StateSet::new(d_a, d_b, states, tol)
}

/// Mutually orthogonal states on `d ⊗ d`: the ranks in `ranks` are filled
/// with consecutive columns of one Haar unitary, and rank-`r` states get
/// random positive weights.
pub fn random_state_set(rng: &mut ChaCha8Rng, d: usize, ranks: &[usize], tol: f64) -> Result<StateSet> {
    let dim = d * d;
    let total: usize = ranks.iter().sum();
    if total > dim {
        return Err(crate::Error::InvalidParameter(alloc::format!(
            "total rank {total} exceeds the system dimension {dim}"
        )));
    }
    let u = haar_unitary(rng, dim);
    let mut col = 0;
    let mut states = Vec::with_capacity(ranks.len());
    for &r in ranks {
        if r == 1 {
            states.push(StateEntry::Pure(u.column(col).into_owned()));
        } else {
            let weights: Vec<f64> = (0..r).map(|_| 0.5 + libm::fabs(gaussian(rng))).collect();
            let sum: f64 = weights.iter().sum();
            let mut rho = DMatrix::<C64>::zeros(dim, dim);
            for (k, w) in weights.iter().enumerate() {
                let v = u.column(col + k);
                rho += v * v.adjoint() * C64::new(w / sum, 0.0);
            }
            states.push(StateEntry::Mixed(HermMatrix::hermitian_part(&rho).into_inner()));
        }
        col += r;
    }
    StateSet::new(d, d, states, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    #[test]
    fn haar_unitary_is_unitary_and_reproducible() {
        let a = haar_unitary(&mut rng(3), 5);
        let b = haar_unitary(&mut rng(3), 5);
        assert!(unitarity_defect(&a) < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let a = gaussian(&mut rng_stream(1, 0));
        let b = gaussian(&mut rng_stream(1, 1));
        assert_ne!(a, b);
    }

    #[test]
    fn traceless_sample_has_unit_norm() {
        let h = random_traceless(&mut rng(9), 4);
        assert!(h.trace().abs() < 1e-12);
        assert!((h.hs_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_sets_validate() {
        let set = random_state_set(&mut rng(5), 3, &[2, 1, 2], 1e-10).unwrap();
        assert_eq!(set.len(), 3);
    }
}
