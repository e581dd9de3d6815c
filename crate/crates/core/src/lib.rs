//! Fourier analysis on bounded Vilenkin groups.
//!
//! The group `G_m` is kept at a finite resolution `N`: every function in
//! scope is constant on the cosets of `I_N`, so each integral is an exact
//! average over `M_N` values. On top of that the crate provides
//!
//! - [`group`]: mixed-radix bases, points and digit expansions;
//! - [`transform`]: Vilenkin characters, a naive reference transform and a
//!   coordinate-factorized fast transform;
//! - [`means`]: Dirichlet, Fejér and Nörlund kernels, partial sums and
//!   means, convolution, and exact kernel identity suites;
//! - [`weights`]: Nörlund weight sequences and their diagnostics;
//! - [`approx`]: `L^p` norms, the exact modulus of continuity, Lipschitz
//!   test functions and evaluators for the approximation bounds.

pub mod approx;
pub mod error;
pub mod group;
pub mod means;
pub mod tolerance;
pub mod transform;
pub mod weights;

pub use error::{Error, Result};
pub use group::{Basis, GroupPoint, IndexExpansion};
pub use transform::{CylinderFunction, Spectrum};
pub use weights::{MonotoneClass, NorlundWeights, WeightSpec};

pub use num_complex::Complex64;

/// Fixed 17-significant-digit scientific formatting used for every CSV value.
///
/// Negative zero is printed as zero so that identical results always produce
/// identical bytes.
pub fn format_decimal(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
