//! Numerical tolerances used across the crate.

/// Structural validation: POVM completeness/positivity, normalization,
/// no-signaling.
pub const STRUCTURAL: f64 = 1e-10;
/// Equality of computed values (Bell values, eigenvalues).
pub const VALUE: f64 = 1e-9;
/// Entrywise matrix equality, Hermiticity.
pub const ENTRY: f64 = 1e-12;
/// Prefix probabilities at or below this make a conditional undefined.
pub const PREFIX_POSITIVITY: f64 = 1e-12;
/// Imaginary part above which a Born probability is rejected.
pub const NONREAL: f64 = 1e-8;
/// Conditional distributions must normalize to this when defined.
pub const CONDITIONAL_NORMALIZATION: f64 = 1e-9;
/// Default numerical slack of the certifiers.
pub const DEFAULT_CERTIFY: f64 = 1e-8;

/// Largest number of copies accepted by composition.
pub const MAX_COPIES: usize = 6;
/// Largest deterministic enumeration `o^(2m)` accepted by the classical bound.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

pub const SEESAW_MAX_ITERATIONS: usize = 10_000;
pub const SEESAW_IMPROVEMENT: f64 = 1e-12;
/// Allowed gap between a see-saw value and the eigen-oracle.
pub const SEESAW_ORACLE_AGREEMENT: f64 = 1e-6;
