//! Numerics for the deformed creation operator `a†_λ = a† + λ`: its
//! non-orthogonal eigenbasis `|n⟩_λ`, the coherent and squeezed states built
//! on it, their photon statistics, and a dense truncated-operator oracle
//! used to cross-check every closed form.

// `!(x > tol)` is used on purpose so that NaN fails the check; index loops
// mirror the matrix-element sums.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod appendix;
pub mod dump;
pub mod error;
pub mod figures;
pub mod fock;
pub mod oracle;
pub mod params;
pub mod specfun;
pub mod states;
pub mod stats;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
