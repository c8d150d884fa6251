//! Dense helpers shared by the subspace code.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub(crate) fn sym_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigen-decomposition of a complex hermitian matrix, eigenvalues ascending.
pub(crate) fn herm_eigen_sorted(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Number of singular values kept by the relative rank rule: `s > tol * s_max`,
/// and nothing at all when `s_max <= tol` (inputs are expected at unit scale).
pub(crate) fn rank_by_rule(singular: &[f64], tol: f64) -> usize {
    let max = singular.iter().cloned().fold(0.0, f64::max);
    if max <= tol {
        return 0;
    }
    singular.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal rows spanning the row space of `rows` under the rank rule.
pub(crate) fn real_row_space(rows: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let ncols = rows.ncols();
    if rows.nrows() == 0 || ncols == 0 {
        return DMatrix::zeros(0, ncols);
    }
    let svd = rows.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let rank = rank_by_rule(&sv, tol);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| rank > 0 && sv[k] > tol * max).collect();
    let mut out = DMatrix::zeros(keep.len(), ncols);
    for (r, &k) in keep.iter().enumerate() {
        let mut row: DVector<f64> = v_t.row(k).transpose();
        canonical_sign(&mut row);
        out.set_row(r, &row.transpose());
    }
    out
}

/// Orthonormal rows spanning the complement of the (orthonormal) rows of
/// `basis` inside `R^n`. Always returns exactly `n - basis.nrows()` rows.
pub(crate) fn real_complement(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let k = basis.nrows();
    if k == 0 {
        return DMatrix::identity(n, n);
    }
    let proj = DMatrix::<f64>::identity(n, n) - basis.transpose() * basis;
    let (_, vectors) = sym_eigen_sorted(proj);
    let count = n.saturating_sub(k);
    let mut out = DMatrix::zeros(count, n);
    for r in 0..count {
        // largest eigenvalues (close to 1) sit at the end
        let mut col: DVector<f64> = vectors.column(n - 1 - r).into_owned();
        canonical_sign(&mut col);
        out.set_row(r, &col.transpose());
    }
    out
}

/// Orthonormal vectors spanning the column space of `cols`. Columns are
/// assumed to carry physical (unit-scale) amplitudes, so there is an absolute
/// floor at `tol` as well as the relative cutoff.
pub(crate) fn complex_column_space(cols: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    if cols.ncols() == 0 || cols.nrows() == 0 {
        return Vec::new();
    }
    let svd = cols.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max <= tol {
        return Vec::new();
    }
    (0..sv.len())
        .filter(|&k| sv[k] > tol * max)
        .map(|k| {
            let mut v: DVector<C64> = u.column(k).into_owned();
            normalize_phase(&mut v);
            v
        })
        .collect()
}

/// Rotate the global phase so the first component of (near) maximal modulus
/// is real and positive.
pub(crate) fn normalize_phase(v: &mut DVector<C64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Flip the sign so the first clearly nonzero component is positive.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|x| x.abs() > max * 1e-8) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Frobenius norm of `u^† u - 1`.
pub(crate) fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm()
}
