//! Pair operators `W_𝐢` and the subspaces `T`, `T⊥`.
//!
//! For `𝐢 = (i, i', j, j')` with `i < i'`, side A uses
//! `W_𝐢 = W_ij^† W_i'j'` on Alice's space. Side B swaps the parties: the
//! coefficient matrices are transposed and the same formula applied, which
//! gives `W_𝐢 = conj(W_ij W_i'j'^†)`. That is the entrywise conjugate of the
//! textbook B-side operator, so `T^(B)` has the same dimension, and the frame
//! vectors of either side are related to the physical measurement vectors by
//! the same complex conjugation.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::hermspace::{self, HermMatrix, SubspaceBasis};
use crate::states::SpectralStateSet;
use crate::{Error, Result, Side, C64};

/// `(i, i', j, j')`: states `i < i'`, eigencomponents `j` of `i` and `j'` of
/// `i'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    pub i: usize,
    pub i_prime: usize,
    pub j: usize,
    pub j_prime: usize,
}

/// `W_𝐢 = H_𝐢 + i A_𝐢`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairOperator {
    pub index: PairIndex,
    pub w: DMatrix<C64>,
    pub h: HermMatrix,
    pub a: HermMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairOperators {
    side: Side,
    dim: usize,
    operators: Vec<PairOperator>,
}

impl PairOperators {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[PairOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// All `H_𝐢` followed by all `A_𝐢`.
    pub fn hermitian_generators(&self) -> Vec<HermMatrix> {
        let mut out: Vec<HermMatrix> = self.operators.iter().map(|o| o.h.clone()).collect();
        out.extend(self.operators.iter().map(|o| o.a.clone()));
        out
    }
}

/// Coefficient matrix seen from the initiating party: rows index the party
/// that finishes, columns the party that measures first.
pub fn oriented_coefficients(w: &DMatrix<C64>, side: Side) -> DMatrix<C64> {
    match side {
        Side::A => w.clone(),
        Side::B => w.transpose(),
    }
}

pub fn build_pair_operators(spec: &SpectralStateSet, side: Side) -> PairOperators {
    let n = spec.len();
    let mut operators = Vec::new();
    for i in 0..n {
        for ip in (i + 1)..n {
            for (j, cj) in spec.components(i).iter().enumerate() {
                let left = oriented_coefficients(&cj.coefficients, side).adjoint();
                for (jp, cjp) in spec.components(ip).iter().enumerate() {
                    let w = &left * oriented_coefficients(&cjp.coefficients, side);
                    operators.push(PairOperator {
                        index: PairIndex { i, i_prime: ip, j, j_prime: jp },
                        h: HermMatrix::hermitian_part(&w),
                        a: HermMatrix::antihermitian_part(&w),
                        w,
                    });
                }
            }
        }
    }
    PairOperators { side, dim: spec.dim(), operators }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TSpaces {
    pub side: Side,
    pub t: SubspaceBasis,
    pub tperp: SubspaceBasis,
    /// `‖1 - P_{T⊥} 1‖ / ‖1‖`.
    pub identity_residual: f64,
}

impl TSpaces {
    pub fn dims(&self) -> (usize, usize) {
        (self.t.len(), self.tperp.len())
    }

    pub fn dim(&self) -> usize {
        self.t.dim_ambient()
    }
}

/// `T = span{H_𝐢, A_𝐢}` and its complement `T⊥`.
///
/// Fails with [`Error::InternalConsistency`] when the identity does not lie in
/// `T⊥` within `tol`.
pub fn build_tspaces(ops: &PairOperators, tol: f64) -> Result<TSpaces> {
    let d = ops.dim();
    let t = hermspace::orthonormalize(d, &ops.hermitian_generators(), tol)?;
    let tperp = hermspace::complement(&t);
    let id = HermMatrix::identity(d);
    let identity_residual = tperp.residual(&id) / libm::sqrt(d as f64);
    if identity_residual > tol {
        return Err(Error::InternalConsistency(alloc::format!(
            "identity is not in T⊥ for side {} (residual {identity_residual:e})",
            ops.side()
        )));
    }
    Ok(TSpaces { side: ops.side(), t, tperp, identity_residual })
}
