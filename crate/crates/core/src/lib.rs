//! Weak Schmidt decompositions of bipartite states on `ℂⁿ ⊗ ℂⁿ`.
//!
//! The crate decides whether a family of pure states can be brought to
//! complex diagonal form by one pair of local unitaries, uses that to
//! recognise Schmidt-correlated mixed states and decide their
//! separability, and builds complex Hadamard matrices together with the
//! generalized Bell bases they induce.
//!
//! Index convention: the basis ket `|j l⟩` (1-based) sits at flat position
//! `(j-1)·n + (l-1)`, so the amplitude vector reshaped row-major is the
//! state's matrix representation.

pub mod bell;
pub mod error;
pub mod hadamard;
pub mod io;
pub mod numerics;
pub mod schmidt_correlated;
pub mod states;
pub mod weak_svd;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerance, C64};
pub use states::{DensityMatrix, Ensemble, PureState, SchmidtForm};

