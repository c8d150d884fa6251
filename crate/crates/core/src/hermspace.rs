//! Real-vector-space linear algebra over `d × d` hermitian matrices.
//!
//! The space `S` of hermitian matrices is a real vector space of dimension
//! `d²` with inner product `<X, Y> = Tr(XY)`. Every matrix is mapped to real
//! coordinates in the fixed orthonormal basis
//!
//! - `E_kk` for each `k`,
//! - `(E_kl + E_lk)/√2` for `k < l`,
//! - `i(E_kl - E_lk)/√2` for `k < l`,
//!
//! so spans, complements and projections reduce to real SVD and symmetric
//! eigenproblems.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::{Error, Result, C64};

/// Absolute tolerance on the largest entry of `X - X^†`.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Default number of extra random combinations tried by
/// [`simultaneous_diagonalize`].
pub const DEFAULT_RETRIES: usize = 8;

/// A `d × d` hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix(DMatrix<C64>);

impl HermMatrix {
    /// Wraps `m` after checking it is square and hermitian within
    /// [`HERMITICITY_TOL`].
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let deviation = max_abs(&(&m - m.adjoint()));
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        // store the exactly hermitian representative
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m^†) / 2`.
    pub fn hermitian_part(m: &DMatrix<C64>) -> Self {
        HermMatrix((m + m.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `(m - m^†) / 2i`.
    pub fn antihermitian_part(m: &DMatrix<C64>) -> Self {
        HermMatrix((m - m.adjoint()) * C64::new(0.0, -0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        HermMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        HermMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermMatrix(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(diag[r], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// `|v><v|`.
    pub fn projector(v: &DVector<C64>) -> Self {
        HermMatrix(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    /// Hilbert–Schmidt norm `sqrt(Tr(X²))`.
    pub fn hs_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermMatrix(&self.0 * C64::new(s, 0.0))
    }

    /// `i[X, Y]`, which is hermitian whenever `X` and `Y` are.
    pub fn commutator_i(&self, other: &HermMatrix) -> HermMatrix {
        let c = &self.0 * &other.0 - &other.0 * &self.0;
        HermMatrix::hermitian_part(&(c * C64::new(0.0, 1.0)))
    }

    /// `‖[X, Y]‖_HS`.
    pub fn commutator_norm(&self, other: &HermMatrix) -> f64 {
        (&self.0 * &other.0 - &other.0 * &self.0).norm()
    }

    /// `U^† X U`.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> HermMatrix {
        HermMatrix::hermitian_part(&(u.adjoint() * &self.0 * u))
    }

    /// Real coordinates in the fixed orthonormal basis of `S` (length `d²`).
    pub fn to_coords(&self) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(d * d);
        for k in 0..d {
            out[k] = self.0[(k, k)].re;
        }
        let mut idx = d;
        for k in 0..d {
            for l in (k + 1)..d {
                out[idx] = SQRT_2 * self.0[(k, l)].re;
                out[idx + 1] = SQRT_2 * self.0[(k, l)].im;
                idx += 2;
            }
        }
        out
    }

    /// Inverse of [`HermMatrix::to_coords`].
    pub fn from_coords(dim: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: coords.len() });
        }
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = C64::new(coords[k], 0.0);
        }
        let mut idx = dim;
        for k in 0..dim {
            for l in (k + 1)..dim {
                let z = C64::new(coords[idx], coords[idx + 1]) / SQRT_2;
                m[(k, l)] = z;
                m[(l, k)] = z.conj();
                idx += 2;
            }
        }
        Ok(HermMatrix(m))
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Tr(XY)`, real for hermitian arguments.
pub fn hs_inner(x: &HermMatrix, y: &HermMatrix) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let d = x.dim();
    let mut acc = 0.0;
    for r in 0..d {
        for c in 0..d {
            acc += (x.0[(r, c)] * y.0[(c, r)]).re;
        }
    }
    Ok(acc)
}

/// An orthonormal (Hilbert–Schmidt) basis of a real subspace of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    dim_ambient: usize,
    elements: Vec<HermMatrix>,
    tol: f64,
}

impl SubspaceBasis {
    /// The zero subspace.
    pub fn empty(dim_ambient: usize, tol: f64) -> Self {
        SubspaceBasis { dim_ambient, elements: Vec::new(), tol }
    }

    /// Wraps elements already known to be orthonormal. The Gram matrix is
    /// checked to be the identity within `10 * tol`.
    pub fn from_orthonormal(dim_ambient: usize, elements: Vec<HermMatrix>, tol: f64) -> Result<Self> {
        for e in &elements {
            if e.dim() != dim_ambient {
                return Err(Error::DimensionMismatch { expected: dim_ambient, found: e.dim() });
            }
        }
        let basis = SubspaceBasis { dim_ambient, elements, tol };
        let defect = basis.gram_defect();
        if defect > 10.0 * tol {
            return Err(Error::InternalConsistency(alloc::format!(
                "basis is not orthonormal (Gram defect {defect:e})"
            )));
        }
        Ok(basis)
    }

    fn from_coord_rows(dim_ambient: usize, rows: &DMatrix<f64>, tol: f64) -> Self {
        let elements = (0..rows.nrows())
            .map(|r| {
                let row: Vec<f64> = rows.row(r).iter().cloned().collect();
                HermMatrix::from_coords(dim_ambient, &row).expect("row length is d²")
            })
            .collect();
        SubspaceBasis { dim_ambient, elements, tol }
    }

    /// Ambient matrix size `d`.
    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Subspace dimension.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermMatrix] {
        &self.elements
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Same elements, with `tol` used for later rank decisions.
    pub fn with_tol(&self, tol: f64) -> Self {
        SubspaceBasis { tol, ..self.clone() }
    }

    /// Coordinates of the elements as rows of a `len × d²` matrix.
    pub fn coords(&self) -> DMatrix<f64> {
        let n = self.dim_ambient * self.dim_ambient;
        let mut out = DMatrix::zeros(self.len(), n);
        for (r, e) in self.elements.iter().enumerate() {
            out.set_row(r, &e.to_coords().transpose());
        }
        out
    }

    /// Frobenius norm of `G - 1` where `G` is the Gram matrix.
    pub fn gram_defect(&self) -> f64 {
        let c = self.coords();
        let k = c.nrows();
        (&c * c.transpose() - DMatrix::<f64>::identity(k, k)).norm()
    }

    /// Expansion coefficients `<T_k, x>` of `x` in this basis.
    pub fn project_coeffs(&self, x: &HermMatrix) -> Vec<f64> {
        let xc = x.to_coords();
        self.elements.iter().map(|e| e.to_coords().dot(&xc)).collect()
    }

    /// `Σ_k c_k T_k` for the given coefficients.
    pub fn combine(&self, coeffs: &[f64]) -> HermMatrix {
        let d = self.dim_ambient;
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            acc += &e.0 * C64::new(*c, 0.0);
        }
        HermMatrix(acc)
    }

    /// Hilbert–Schmidt distance from `x` to the subspace.
    pub fn residual(&self, x: &HermMatrix) -> f64 {
        let xc = x.to_coords();
        let mut r = xc.clone();
        for e in &self.elements {
            let ec = e.to_coords();
            r -= &ec * ec.dot(&xc);
        }
        r.norm()
    }

    /// `x` lies in the span within `tol` (relative to `‖x‖`).
    pub fn contains(&self, x: &HermMatrix, tol: f64) -> bool {
        let norm = x.hs_norm();
        norm == 0.0 || self.residual(x) <= tol * norm.max(1.0)
    }

    /// Largest projection residual of either basis onto the span of the other.
    pub fn span_distance(&self, other: &SubspaceBasis) -> f64 {
        let a = self.elements.iter().map(|e| other.residual(e));
        let b = other.elements.iter().map(|e| self.residual(e));
        a.chain(b).fold(0.0, f64::max)
    }

    /// Same subspace: equal dimension and mutual residuals within `tol`.
    pub fn spans_same(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.dim_ambient == other.dim_ambient
            && self.len() == other.len()
            && self.span_distance(other) <= tol
    }
}

/// Orthonormal basis of `span(generators)`.
///
/// The generators are stacked as coordinate rows and the rank is the number
/// of singular values above `tol × σ_max`. A stack whose largest singular
/// value is itself below `tol` is treated as zero.
pub fn orthonormalize(dim: usize, generators: &[HermMatrix], tol: f64) -> Result<SubspaceBasis> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("tolerance must be positive, got {tol}")));
    }
    let n = dim * dim;
    let mut stack = DMatrix::zeros(generators.len(), n);
    for (r, g) in generators.iter().enumerate() {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        stack.set_row(r, &g.to_coords().transpose());
    }
    let rows = linalg::real_row_space(&stack, tol);
    Ok(SubspaceBasis::from_coord_rows(dim, &rows, tol))
}

/// Orthonormal basis of the Hilbert–Schmidt complement of `sub` in `S`.
pub fn complement(sub: &SubspaceBasis) -> SubspaceBasis {
    let d = sub.dim_ambient;
    let rows = linalg::real_complement(&sub.coords(), d * d);
    SubspaceBasis::from_coord_rows(d, &rows, sub.tol)
}

/// Orthonormal basis of `span{ i[T_j, T_k] : j < k }`.
pub fn commutator_space(basis: &SubspaceBasis) -> Result<SubspaceBasis> {
    let els = basis.elements();
    let mut gens = Vec::with_capacity(els.len() * els.len().saturating_sub(1) / 2);
    for j in 0..els.len() {
        for k in (j + 1)..els.len() {
            gens.push(els[j].commutator_i(&els[k]));
        }
    }
    orthonormalize(basis.dim_ambient, &gens, basis.tol)
}

/// Largest `‖[T_j, T_k]‖_HS` over pairs of basis elements.
pub fn max_commutator_norm(basis: &SubspaceBasis) -> f64 {
    let els = basis.elements();
    let mut worst: f64 = 0.0;
    for j in 0..els.len() {
        for k in (j + 1)..els.len() {
            worst = worst.max(els[j].commutator_norm(&els[k]));
        }
    }
    worst
}

/// All basis elements commute pairwise within `tol`.
pub fn is_abelian(basis: &SubspaceBasis, tol: f64) -> bool {
    max_commutator_norm(basis) <= tol
}

/// An orthonormal frame of `C^d`, stored as the columns of a unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    vectors: DMatrix<C64>,
}

impl EigenFrame {
    /// Wraps the columns of `u`, checking `‖u^† u - 1‖ <= tol`.
    pub fn from_unitary(u: DMatrix<C64>, tol: f64) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
        }
        let defect = linalg::unitarity_defect(&u);
        if defect > tol {
            return Err(Error::InternalConsistency(alloc::format!(
                "frame is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(EigenFrame { vectors: u })
    }

    pub fn standard(dim: usize) -> Self {
        EigenFrame { vectors: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    pub fn vectors(&self) -> Vec<DVector<C64>> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    pub fn projectors(&self) -> Vec<HermMatrix> {
        (0..self.dim()).map(|k| HermMatrix::projector(&self.vector(k))).collect()
    }

    /// Off-diagonal Hilbert–Schmidt norm of `U^† X U`.
    pub fn off_diagonal_norm(&self, x: &HermMatrix) -> f64 {
        let m = x.conjugate_by(&self.vectors);
        let d = self.dim();
        let mut acc = 0.0;
        for r in 0..d {
            for c in 0..d {
                if r != c {
                    acc += m.0[(r, c)].norm_sqr();
                }
            }
        }
        libm::sqrt(acc)
    }
}

/// Common eigenbasis of a commuting family.
///
/// Eigendecomposes a random real combination `Σ c_j T_j` with standard normal
/// coefficients drawn from a `ChaCha8` stream seeded by `seed`, and accepts
/// the eigenvectors once every `T_j` is diagonal within `tol`. Up to
/// `retries` further combinations are tried.
pub fn simultaneous_diagonalize(
    basis: &SubspaceBasis,
    tol: f64,
    retries: usize,
    seed: u64,
) -> Result<EigenFrame> {
    let max_commutator = max_commutator_norm(basis);
    if max_commutator > tol {
        return Err(Error::NonCommutingInput { max_commutator });
    }
    let d = basis.dim_ambient();
    if basis.is_empty() {
        return Ok(EigenFrame::standard(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = retries + 1;
    for _ in 0..attempts {
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let combo = basis.combine(&coeffs);
        let (_, mut vecs) = linalg::herm_eigen_sorted(combo.0);
        for c in 0..d {
            let mut col: DVector<C64> = vecs.column(c).into_owned();
            linalg::normalize_phase(&mut col);
            vecs.set_column(c, &col);
        }
        let frame = EigenFrame { vectors: vecs };
        if basis.elements().iter().all(|t| frame.off_diagonal_norm(t) <= tol) {
            return Ok(frame);
        }
    }
    Err(Error::DegenerateFailure { attempts })
}

/// The standard orthonormal basis of `S` used for coordinates.
pub fn standard_basis(dim: usize) -> Vec<HermMatrix> {
    let n = dim * dim;
    (0..n)
        .map(|k| {
            let mut c = vec![0.0; n];
            c[k] = 1.0;
            HermMatrix::from_coords(dim, &c).expect("length d²")
        })
        .collect()
}
