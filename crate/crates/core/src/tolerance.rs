//! Numerical tolerances shared by the library, the CLI and the test suites.

/// Sup-relative agreement of transform paths and kernel identities.
pub const TRANSFORM: f64 = 1e-10;

/// Single character evaluations.
pub const CHARACTER: f64 = 1e-12;

/// Kernel identity residuals.
pub const IDENTITY: f64 = 1e-10;

/// Relative slack on explicit-constant bounds: pass iff `lhs <= rhs (1 + BOUND)`.
pub const BOUND: f64 = 1e-9;

/// Approximation errors at or below this multiple of `max(1, sup|f|)` are
/// floating-point noise of an exactly vanishing quantity.
pub const ROUNDOFF: f64 = 1e-12;

/// Agreement required when two summation methods coincide algebraically.
pub const REDUCTION: f64 = 1e-12;

/// Cap on the empirical constant of the bounds with an unspecified constant,
/// as a multiple of `R^3`.
pub const EMPIRICAL_C_CAP: f64 = 32.0;

/// Largest allowed ratio of the last-quarter to the first-quarter maximum of
/// an empirical constant along the scale grid.
pub const EMPIRICAL_C_GROWTH: f64 = 2.0;
