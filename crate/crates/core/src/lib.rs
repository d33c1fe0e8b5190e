//! Orthogonally invariant multipartite quantum states.
//!
//! A state of `2K` qudits (local dimension `d`) that is invariant under
//! `O_1 ⊗ … ⊗ O_K ⊗ O_1 ⊗ … ⊗ O_K` for real orthogonal `O_i` is fully
//! described by `3^K` fidelities `π_α = Tr(ρ Π^α)`, one per trinary
//! multi-index `α`. This crate builds the projector family `Π^α`, maps dense
//! density matrices onto the fidelity simplex and back, applies partial
//! transpositions directly in fidelity coordinates, and checks the
//! separability bounds and PPT conditions. Every closed form is
//! cross-checked against dense matrices in [`oracle`].
//!
//! Subsystems are numbered from 0, leftmost tensor factor first. Alice `i`
//! sits at position `i` and Bob `i` at position `K + i`.

pub mod dense;
pub mod error;
pub mod index;
pub mod oracle;
pub mod projectors;
pub mod scan;
pub mod simplex;
pub mod tol;

pub use dense::{ComplexOperator, Field, SubsystemSet};
pub use error::{Error, Result};
pub use index::{MultiIndex, TranspositionMask};
pub use projectors::{BipartiteBasis, ProjectorFamily};
pub use simplex::{CMatrix, FidelityVector};
