use std::fmt;

use serde::{Serialize, Serializer};

use super::bounds::{check_admissible, Theorem};
use super::{lip_generator, lp_norm_of, Exponent, LipSpec};
use crate::error::{Error, Result};
use crate::group::Basis;
use crate::means::Summation;
use crate::tolerance;
use crate::transform::{fast_forward_transform, CylinderFunction};
use crate::weights::NorlundWeights;

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence-rate bands `O(n^-alpha)`, `O(n^-1 log n)` and `O(n^-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateClass {
    /// Every error vanishes to rounding.
    Degenerate,
    Sublinear,
    LogLinear,
    Linear,
}

impl RateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RateClass::Degenerate => "degenerate/exact",
            RateClass::Sublinear => "sublinear",
            RateClass::LogLinear => "log-linear",
            RateClass::Linear => "linear",
        }
    }
}

impl fmt::Display for RateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RateClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Slopes at or above this are read as `n^-alpha` with `alpha < 1`.
const SUBLINEAR_SLOPE: f64 = -0.75;

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Fitted log-log slope and rate class of errors `(n, e_n)`.
///
/// Below slope `-0.75` the class is whichever of `e_n n` and
/// `e_n n / ln n` varies less over the grid (in log scale).
pub fn classify_rate(points: &[(usize, f64)], noise: f64) -> (Option<f64>, RateClass) {
    if points.iter().all(|&(_, e)| e <= noise) {
        return (None, RateClass::Degenerate);
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, e)| ((n as f64).ln(), e.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let slope = fit_slope(&logs);
    if slope >= SUBLINEAR_SLOPE {
        return (Some(slope), RateClass::Sublinear);
    }
    let linear = spread(logs.iter().map(|&(ln_n, ln_e)| ln_e + ln_n));
    let log_linear = spread(logs.iter().map(|&(ln_n, ln_e)| ln_e + ln_n - ln_n.ln()));
    let class = if log_linear < linear {
        RateClass::LogLinear
    } else {
        RateClass::Linear
    };
    (Some(slope), class)
}

/// Errors `||t_{M_j} f - f||_p` along the scale grid with their fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub spec: LipSpec,
    pub weights: String,
    /// `(n, error)` for `n = M_j`, `j = 2..=N`.
    pub points: Vec<(usize, f64)>,
    pub slope: Option<f64>,
    pub class: RateClass,
    /// Extremes of `e_n n / ln n` over the grid.
    pub log_linear_band: (f64, f64),
}

/// Fits the convergence rate of the Nörlund means for one member of a
/// Lipschitz family; the weights must satisfy the hypotheses of Theorem 1 or
/// Theorem 3.
pub fn rate_table(spec: &LipSpec, basis: &Basis, weights: &NorlundWeights, seed: u64) -> Result<RateTable> {
    let n_max = basis.size();
    let theorem = if weights.is_non_decreasing() {
        Theorem::One
    } else {
        Theorem::Three
    };
    check_admissible(theorem, weights, n_max)?;
    if spec.p.is_infinite() {
        return Err(Error::InvalidExponent(spec.p.value()));
    }
    let levels: Vec<usize> = (2..=basis.resolution()).collect();
    if levels.len() < 3 {
        return Err(Error::DegenerateGrid(levels.len()));
    }
    let f = lip_generator(spec, basis, seed)?.function;
    let spectrum = fast_forward_transform(&f);
    let method = Summation::Norlund(weights);
    let points = levels
        .iter()
        .map(|&j| {
            let n = basis.scale(j);
            let mean = method.apply(&spectrum, n)?;
            let err = lp_norm_of(
                mean.values().iter().zip(f.values()).map(|(a, b)| a - b),
                f.len(),
                spec.p,
            );
            Ok((n, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let noise = tolerance::ROUNDOFF * f.sup_norm().max(1.0);
    let (slope, class) = classify_rate(&points, noise);
    let band = points
        .iter()
        .map(|&(n, e)| e * n as f64 / (n as f64).ln())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(RateTable {
        spec: *spec,
        weights: weights.label().to_string(),
        points,
        slope,
        class,
        log_linear_band: band,
    })
}

/// Non-vanishing of `M_n ||sigma_{M_n} f - f||_p` on a scale grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityVerdict {
    pub p: Exponent,
    /// `(j, M_j ||sigma_{M_j} f - f||_p)`.
    pub points: Vec<(usize, f64)>,
    pub floor: f64,
    pub min: f64,
    pub pass: bool,
}

/// Evaluates `M_j ||sigma_{M_j} f - f||_p` for each scale index in `levels`
/// and passes when the minimum stays above half the smaller of the values
/// at the two smallest indices.
///
/// For a non-constant `f` this quantity cannot tend to zero; the check is
/// a finite-grid witness, not a proof.
pub fn constant_rigidity_check(f: &CylinderFunction, p: Exponent, levels: &[usize]) -> Result<RigidityVerdict> {
    if f.oscillation() <= 1e-8 {
        return Err(Error::Inapplicable("constant function"));
    }
    let basis = f.basis();
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    if levels.is_empty() {
        return Err(Error::DegenerateGrid(0));
    }
    if let Some(&j) = levels.iter().find(|&&j| j > basis.resolution()) {
        return Err(Error::OutOfRange {
            what: "scale index",
            value: j,
            bound: format!("<= N = {}", basis.resolution()),
        });
    }
    let spectrum = fast_forward_transform(f);
    let points = levels
        .iter()
        .map(|&j| {
            let m = basis.scale(j);
            let mean = Summation::Fejer.apply(&spectrum, m)?;
            let err = lp_norm_of(mean.values().iter().zip(f.values()).map(|(a, b)| a - b), f.len(), p);
            Ok((j, m as f64 * err))
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = 0.5 * points.iter().take(2).map(|x| x.1).fold(f64::INFINITY, f64::min);
    let min = points.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(RigidityVerdict {
        p,
        points,
        floor,
        min,
        pass: floor > 0.0 && min > floor,
    })
}
