//! State sets, padding to a square system, spectral decomposition and the
//! generalized Bell family.
//!
//! Coordinates: component `a * d_B + b` of a state vector is the amplitude of
//! `|s_a>_A |s_b>_B`. The coefficient matrix `W` of a vector on a square
//! `d ⊗ d` system has `W[(k, l)]` equal to the amplitude of `|s_l>_A |s_k>_B`,
//! so rows index Bob and columns index Alice.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result, C64};

/// Window below zero inside which density-matrix eigenvalues are clamped.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;

/// Two retained eigenvalues closer than this trigger a degeneracy warning.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// One member of a state set.
#[derive(Clone, Debug, PartialEq)]
pub enum StateEntry {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

impl StateEntry {
    /// Density matrix of the entry.
    pub fn density(&self) -> DMatrix<C64> {
        match self {
            StateEntry::Pure(v) => v * v.adjoint(),
            StateEntry::Mixed(m) => m.clone(),
        }
    }

    fn len(&self) -> usize {
        match self {
            StateEntry::Pure(v) => v.len(),
            StateEntry::Mixed(m) => m.nrows(),
        }
    }
}

/// A validated ensemble of mutually orthogonal bipartite states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    d_a: usize,
    d_b: usize,
    states: Vec<StateEntry>,
}

impl StateSet {
    /// Validates normalization, positivity and pairwise orthogonality.
    ///
    /// Pure vectors must have unit norm within `tol`; density matrices must
    /// be hermitian, of unit trace and have no eigenvalue below
    /// `-EIGENVALUE_CLAMP`. Pure pairs need `|<ψ|ψ'>|² <= tol`, other pairs
    /// `Tr(ρ ρ') <= tol`.
    pub fn new(d_a: usize, d_b: usize, states: Vec<StateEntry>, tol: f64) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "local dimensions must be positive, got {d_a}x{d_b}"
            )));
        }
        let n = d_a * d_b;
        for (idx, s) in states.iter().enumerate() {
            if s.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.len() });
            }
            match s {
                StateEntry::Pure(v) => {
                    let deviation = (v.norm() - 1.0).abs();
                    if deviation > tol {
                        return Err(Error::Normalization { state: idx, deviation });
                    }
                }
                StateEntry::Mixed(m) => {
                    if m.ncols() != n {
                        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
                    }
                    let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if herm > tol {
                        return Err(Error::NotHermitian { deviation: herm });
                    }
                    let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
                    if (trace - 1.0).abs() > tol {
                        return Err(Error::Normalization { state: idx, deviation: (trace - 1.0).abs() });
                    }
                    let (values, _) = linalg::herm_eigen_sorted((m + m.adjoint()) * C64::new(0.5, 0.0));
                    if let Some(&lowest) = values.first() {
                        if lowest < -EIGENVALUE_CLAMP {
                            return Err(Error::NegativeEigenvalue { state: idx, value: lowest });
                        }
                    }
                }
            }
        }
        let set = StateSet { d_a, d_b, states };
        set.check_orthogonality(tol)?;
        Ok(set)
    }

    fn check_orthogonality(&self, tol: f64) -> Result<()> {
        let mut worst: Option<(usize, usize, f64, f64)> = None;
        let densities: Vec<Option<DMatrix<C64>>> = self
            .states
            .iter()
            .map(|s| match s {
                StateEntry::Pure(_) => None,
                StateEntry::Mixed(m) => Some(m.clone()),
            })
            .collect();
        for i in 0..self.states.len() {
            for k in (i + 1)..self.states.len() {
                // (score compared against tol, reported overlap)
                let (score, overlap) = match (&self.states[i], &self.states[k]) {
                    (StateEntry::Pure(a), StateEntry::Pure(b)) => {
                        let o = a.dotc(b).norm();
                        (o * o, o)
                    }
                    _ => {
                        let ri = densities[i].clone().unwrap_or_else(|| self.states[i].density());
                        let rk = densities[k].clone().unwrap_or_else(|| self.states[k].density());
                        let t = (ri * rk).trace().re;
                        (t, t)
                    }
                };
                if score > tol && worst.is_none_or(|w| score > w.2) {
                    worst = Some((i, k, score, overlap));
                }
            }
        }
        match worst {
            Some((first, second, _, overlap)) => Err(Error::Orthogonality { first, second, overlap }),
            None => Ok(()),
        }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateEntry] {
        &self.states
    }

    pub fn is_square(&self) -> bool {
        self.d_a == self.d_b
    }

    /// Embeds both local spaces into dimension `max(d_A, d_B)` by zero
    /// padding. Square sets are returned unchanged.
    pub fn pad_to_square(&self) -> StateSet {
        if self.is_square() {
            return self.clone();
        }
        let d = self.d_a.max(self.d_b);
        let map = |idx: usize| (idx / self.d_b) * d + idx % self.d_b;
        let states = self
            .states
            .iter()
            .map(|s| match s {
                StateEntry::Pure(v) => {
                    let mut out = DVector::zeros(d * d);
                    for (idx, z) in v.iter().enumerate() {
                        out[map(idx)] = *z;
                    }
                    StateEntry::Pure(out)
                }
                StateEntry::Mixed(m) => {
                    let mut out = DMatrix::zeros(d * d, d * d);
                    for r in 0..m.nrows() {
                        for c in 0..m.ncols() {
                            out[(map(r), map(c))] = m[(r, c)];
                        }
                    }
                    StateEntry::Mixed(out)
                }
            })
            .collect();
        StateSet { d_a: d, d_b: d, states }
    }

    /// Swaps the roles of the two parties.
    pub fn swap_parties(&self) -> StateSet {
        let (da, db) = (self.d_a, self.d_b);
        let map = |idx: usize| (idx % db) * da + idx / db;
        let states = self
            .states
            .iter()
            .map(|s| match s {
                StateEntry::Pure(v) => {
                    let mut out = DVector::zeros(v.len());
                    for (idx, z) in v.iter().enumerate() {
                        out[map(idx)] = *z;
                    }
                    StateEntry::Pure(out)
                }
                StateEntry::Mixed(m) => {
                    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
                    for r in 0..m.nrows() {
                        for c in 0..m.ncols() {
                            out[(map(r), map(c))] = m[(r, c)];
                        }
                    }
                    StateEntry::Mixed(out)
                }
            })
            .collect();
        StateSet { d_a: db, d_b: da, states }
    }
}

/// One eigencomponent `λ_ij |ψ_ij><ψ_ij|` of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralComponent {
    pub eigenvalue: f64,
    /// `|ψ_ij>` in the `a * d + b` layout.
    pub vector: DVector<C64>,
    /// `W_ij`, rows indexing Bob and columns Alice.
    pub coefficients: DMatrix<C64>,
}

/// Raised when a state has repeated nonzero eigenvalues, so its
/// eigenvectors (and the coefficient matrices) are not unique.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyWarning {
    pub state: usize,
    pub eigenvalues: (f64, f64),
}

/// Spectral data of every state on a square `d ⊗ d` system.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralStateSet {
    dim: usize,
    states: Vec<Vec<SpectralComponent>>,
    warnings: Vec<DegeneracyWarning>,
}

impl SpectralStateSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of states `n`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn components(&self, i: usize) -> &[SpectralComponent] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<SpectralComponent>] {
        &self.states
    }

    /// Ranks `r_i`.
    pub fn ranks(&self) -> Vec<usize> {
        self.states.iter().map(|s| s.len()).collect()
    }

    pub fn warnings(&self) -> &[DegeneracyWarning] {
        &self.warnings
    }

    /// `ρ_i = Σ_j λ_ij |ψ_ij><ψ_ij|`.
    pub fn reconstruct(&self, i: usize) -> DMatrix<C64> {
        let n = self.dim * self.dim;
        let mut acc = DMatrix::zeros(n, n);
        for c in &self.states[i] {
            acc += &c.vector * c.vector.adjoint() * C64::new(c.eigenvalue, 0.0);
        }
        acc
    }
}

/// Reshapes a vector in the `a * d + b` layout into its coefficient matrix.
pub fn coefficient_matrix(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |k, l| v[l * d + k])
}

/// Inverse of [`coefficient_matrix`].
pub fn vector_from_coefficients(w: &DMatrix<C64>) -> DVector<C64> {
    let d = w.nrows();
    DVector::from_fn(d * d, |idx, _| w[(idx % d, idx / d)])
}

/// Eigendecomposition of every state; eigenvalues below `tol` are dropped.
pub fn spectral_decompose(set: &StateSet, tol: f64) -> Result<SpectralStateSet> {
    if !set.is_square() {
        return Err(Error::NotSquare { d_a: set.d_a, d_b: set.d_b });
    }
    let d = set.d_a;
    let mut states = Vec::with_capacity(set.len());
    let mut warnings = Vec::new();
    for (idx, entry) in set.states.iter().enumerate() {
        let comps = match entry {
            StateEntry::Pure(v) => alloc::vec![SpectralComponent {
                eigenvalue: 1.0,
                vector: v.clone(),
                coefficients: coefficient_matrix(v, d),
            }],
            StateEntry::Mixed(m) => {
                let (values, vectors) = linalg::herm_eigen_sorted((m + m.adjoint()) * C64::new(0.5, 0.0));
                let mut comps = Vec::new();
                // descending eigenvalue order
                for k in (0..values.len()).rev() {
                    let lambda = values[k];
                    if lambda < -EIGENVALUE_CLAMP {
                        return Err(Error::NegativeEigenvalue { state: idx, value: lambda });
                    }
                    if lambda <= tol {
                        continue;
                    }
                    let mut v: DVector<C64> = vectors.column(k).into_owned();
                    linalg::normalize_phase(&mut v);
                    comps.push(SpectralComponent {
                        eigenvalue: lambda,
                        coefficients: coefficient_matrix(&v, d),
                        vector: v,
                    });
                }
                for pair in comps.windows(2) {
                    if (pair[0].eigenvalue - pair[1].eigenvalue).abs() <= DEGENERACY_GAP {
                        warnings.push(DegeneracyWarning {
                            state: idx,
                            eigenvalues: (pair[0].eigenvalue, pair[1].eigenvalue),
                        });
                    }
                }
                comps
            }
        };
        states.push(comps);
    }
    Ok(SpectralStateSet { dim: d, states, warnings })
}

/// Builds a spectral set straight from orthonormal pure vectors on `d ⊗ d`.
pub fn spectral_from_pure(d: usize, vectors: &[DVector<C64>]) -> SpectralStateSet {
    let states = vectors
        .iter()
        .map(|v| {
            alloc::vec![SpectralComponent {
                eigenvalue: 1.0,
                vector: v.clone(),
                coefficients: coefficient_matrix(v, d),
            }]
        })
        .collect();
    SpectralStateSet { dim: d, states, warnings: Vec::new() }
}

/// `(W_nm)_{kj} = e^{2πi jn/d} / √d · δ_{j ⊕ m, k}`.
pub fn gen_bell_coefficients(n_idx: usize, m_idx: usize, d: usize) -> Result<DMatrix<C64>> {
    if n_idx >= d {
        return Err(Error::IndexOutOfRange { index: n_idx, bound: d });
    }
    if m_idx >= d {
        return Err(Error::IndexOutOfRange { index: m_idx, bound: d });
    }
    let norm = 1.0 / libm::sqrt(d as f64);
    let mut w = DMatrix::zeros(d, d);
    for j in 0..d {
        let k = (j + m_idx) % d;
        let angle = 2.0 * PI * ((j * n_idx) % d) as f64 / d as f64;
        w[(k, j)] = C64::new(libm::cos(angle), libm::sin(angle)) * norm;
    }
    Ok(w)
}

/// Generalized Bell state `|ψ_nm> = Σ_{j,k} (W_nm)_{kj} |s_j>_A |s_k>_B`.
pub fn gen_bell(n_idx: usize, m_idx: usize, d: usize) -> Result<DVector<C64>> {
    Ok(vector_from_coefficients(&gen_bell_coefficients(n_idx, m_idx, d)?))
}

/// State set of generalized Bell states with the given `(n, m)` labels.
pub fn bell_family(d: usize, indices: &[(usize, usize)], tol: f64) -> Result<StateSet> {
    let states = indices
        .iter()
        .map(|&(n, m)| gen_bell(n, m, d).map(StateEntry::Pure))
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(d, d, states, tol)
}

/// The product family `{ |s_i>_A |0>_B }_{i < d}`.
pub fn product_family(d: usize) -> StateSet {
    let states = (0..d)
        .map(|i| {
            let mut v = DVector::zeros(d * d);
            v[i * d] = C64::new(1.0, 0.0);
            StateEntry::Pure(v)
        })
        .collect();
    StateSet { d_a: d, d_b: d, states }
}
