//! Numerical tolerances shared across the crate.

/// Largest operator dimension any dense routine will build.
pub const MAX_DIM: usize = 4096;

/// Allowed `max|A − A†|`, relative to the largest entry magnitude of `A`.
pub const HERMITIAN: f64 = 1e-12;

/// Default slack for positivity: `λ_min ≥ −PSD`.
pub const PSD: f64 = 1e-9;

/// Default tolerance wherever a caller does not supply one.
pub const DEFAULT: f64 = 1e-9;

/// Allowed deviation of `Σ π_α` from 1 for a state-valued fidelity vector.
pub const SUM: f64 = 1e-12;

/// Allowed deviation of `Tr ρ` from 1 for dense density matrices.
pub const TRACE: f64 = 1e-10;

/// Allowed deviation of `‖v‖` from 1 for input state vectors.
pub const NORM: f64 = 1e-10;
