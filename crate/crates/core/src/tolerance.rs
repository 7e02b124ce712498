//! Numeric tolerances shared by all comparisons.

/// Snapping tolerance for final integer answers (Hom dimensions, degrees).
pub const FINAL_TOL: f64 = 1e-6;

/// Snapping tolerance for intermediate values and identities.
pub const INTERMEDIATE_TOL: f64 = 1e-9;

/// Bound on the pre-snap orthogonality residual of a character table.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Bound on operator-level residuals in the Weil model.
pub const OPERATOR_TOL: f64 = 1e-9;
