//! Dense complex linear algebra used by the rest of the crate.

mod eigh;
mod joint;
mod matrix;
mod predicates;
pub mod random;
mod svd;
mod tolerance;

pub use eigh::{eigh, Eigh};
pub use joint::{joint_diag_hermitian, CLUSTER_EPS};
pub use matrix::{canonical_phase, distance_up_to_phase, inner, kron_vec, norm, ComplexMatrix, C64, ONE, ZERO};
pub use predicates::{is_diagonal, is_normal, is_unitary, normality_defect};
pub use svd::{svd, Svd};
pub(crate) use joint::clusters;
pub use tolerance::{ScaleMode, Tolerance};
