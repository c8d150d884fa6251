//! Decision procedure for one-way LOCC distinguishability of orthogonal
//! bipartite states.
//!
//! Given `n` mutually orthogonal states on `C^{d_A} ⊗ C^{d_B}`, the crate builds
//! the real subspace `T` of `d × d` hermitian matrices spanned by the
//! hermitian and antihermitian parts of every cross-pair operator
//! `W_ij^† W_i'j'`, takes its Hilbert–Schmidt complement `T⊥`, and decides
//! whether `T⊥` contains a maximally abelian subspace (MAS). A MAS in `T⊥`
//! is equivalent to a one-way protocol in which the initiating party performs
//! a rank-one projective measurement; when one is found the protocol is
//! constructed, checked against the orthogonality-preserving equations and can
//! be simulated.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line front end live in the companion `locc` crate.
//!
//! Module map:
//!
//! - [`hermspace`]: linear algebra over the real vector space of hermitian
//!   matrices (spans, complements, commutator spaces, simultaneous
//!   diagonalization).
//! - [`states`]: state sets, padding, spectral decomposition and the
//!   generalized Bell family.
//! - [`tspace`]: pair operators and the spaces `T`, `T⊥` for either
//!   initiating party.
//! - [`mas`]: the dimension-indexed decision tree.
//! - [`protocol`]: measurement construction, verification and Monte-Carlo
//!   simulation.
//! - [`oracle`]: independent randomized checkers.
//! - [`pipeline`]: the full per-side analysis used by the CLI.

#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
mod linalg;
pub mod hermspace;
pub mod mas;
pub mod oracle;
pub mod pipeline;
pub mod protocol;
pub mod random;
pub mod states;
pub mod tspace;

pub use error::{Error, Result};
pub use hermspace::{EigenFrame, HermMatrix, SubspaceBasis};
pub use mas::{MasDecision, Reason, Verdict};
pub use protocol::{AliceMeasurement, Protocol, SimulationStats};
pub use states::{SpectralStateSet, StateEntry, StateSet};
pub use tspace::{PairOperators, TSpaces};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default relative rank tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Which party initiates the one-way protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::A, Side::B];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl core::fmt::Display for Side {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}
