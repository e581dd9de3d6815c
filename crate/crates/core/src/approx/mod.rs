//! `L^p` norms, the exact modulus of continuity, Lipschitz test functions and
//! the approximation bound evaluators.
//!
//! Translations by `t` with `|t| < 1/M_s` are taken to be translations by
//! `t in I_s`, so for functions constant on `I_N` cosets every modulus is a
//! finite maximum over `M_N / M_s` representatives.

mod bounds;
mod lip;
mod rates;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::transform::CylinderFunction;

pub use bounds::{bound_sweep, check_admissible, growth_check, BoundContext, BoundReport, GrowthCheck, Theorem};
pub use lip::{corpus, lip_generator, CorpusEntry, LipBand, LipFunction, LipKind, LipSpec};
pub use rates::{classify_rate, constant_rigidity_check, fit_slope, rate_table, RateClass, RateTable, RigidityVerdict};

/// An exponent `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "Inf" | "infinity" | "∞") {
            return Ok(Self::INFINITY);
        }
        let p: f64 = s.parse().map_err(|_| Error::Parse(s.to_string()))?;
        if p.is_nan() {
            return Err(Error::Parse(s.to_string()));
        }
        Self::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

/// `((1/M) sum |v|^p)^(1/p)`, or `max |v|` for `p = inf`.
pub(crate) fn lp_norm_of(values: impl Iterator<Item = Complex64>, len: usize, p: Exponent) -> f64 {
    let p = p.value();
    if p.is_infinite() {
        return values.map(|v| v.norm()).fold(0.0, f64::max);
    }
    let inv = 1.0 / len as f64;
    if p == 1.0 {
        values.map(|v| v.norm()).sum::<f64>() * inv
    } else if p == 2.0 {
        (values.map(|v| v.norm_sqr()).sum::<f64>() * inv).sqrt()
    } else if p.fract() == 0.0 && p <= 16.0 {
        let k = p as i32;
        (values.map(|v| v.norm().powi(k)).sum::<f64>() * inv).powf(1.0 / p)
    } else {
        (values.map(|v| v.norm().powf(p)).sum::<f64>() * inv).powf(1.0 / p)
    }
}

/// `||f||_p` with respect to the normalized Haar measure.
pub fn lp_norm(f: &CylinderFunction, p: Exponent) -> f64 {
    lp_norm_of(f.values().iter().copied(), f.len(), p)
}

/// `||f - g||_p` without materializing the difference.
pub fn lp_distance(f: &CylinderFunction, g: &CylinderFunction, p: Exponent) -> Result<f64> {
    f.basis().ensure_same(g.basis())?;
    Ok(lp_norm_of(
        f.values().iter().zip(g.values()).map(|(a, b)| a - b),
        f.len(),
        p,
    ))
}

/// `g(x) = f(x + t)` under group addition.
pub fn translate(f: &CylinderFunction, t: &GroupPoint) -> Result<CylinderFunction> {
    f.basis().ensure_same(t.basis())?;
    let map = f.basis().translation_map(t.index());
    let values = map.iter().map(|&y| f.value(y)).collect();
    CylinderFunction::new(f.basis(), values)
}

/// `omega_p(1/M_s, f)` for `s = 0..=N` at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusProfile {
    pub p: Exponent,
    pub omega: Vec<f64>,
}

impl ModulusProfile {
    pub fn compute(f: &CylinderFunction, p: Exponent) -> Self {
        Self::compute_many(f, &[p]).pop().expect("one exponent")
    }

    /// Profiles for several exponents from one pass over the translations.
    pub fn compute_many(f: &CylinderFunction, exponents: &[Exponent]) -> Vec<Self> {
        let basis = f.basis();
        let size = basis.size();
        let levels = basis.resolution();
        // best[e][s]: max distance over t in I_s \ I_{s+1}
        let mut best = vec![vec![0.0f64; levels + 1]; exponents.len()];
        for t in 1..size {
            let s = (0..levels).rfind(|&s| t % basis.scale(s) == 0).unwrap_or(0);
            let map = basis.translation_map(t);
            for (e, &p) in exponents.iter().enumerate() {
                let d = lp_norm_of(map.iter().enumerate().map(|(x, &y)| f.value(y) - f.value(x)), size, p);
                best[e][s] = best[e][s].max(d);
            }
        }
        exponents
            .iter()
            .zip(best)
            .map(|(&p, mut omega)| {
                for s in (0..levels).rev() {
                    omega[s] = omega[s].max(omega[s + 1]);
                }
                Self { p, omega }
            })
            .collect()
    }

    pub fn omega(&self, s: usize) -> f64 {
        self.omega[s]
    }
}

/// `omega_p(1/M_s, f) = max_{t in I_s} ||f(. + t) - f||_p`, computed exactly.
pub fn modulus(f: &CylinderFunction, p: Exponent, s: usize) -> Result<f64> {
    let basis = f.basis();
    if s > basis.resolution() {
        return Err(Error::OutOfRange {
            what: "scale index",
            value: s,
            bound: format!("<= N = {}", basis.resolution()),
        });
    }
    let size = basis.size();
    let step = basis.scale(s);
    let mut worst = 0.0f64;
    for t in (step..size).step_by(step) {
        let map = basis.translation_map(t);
        let d = lp_norm_of(map.iter().enumerate().map(|(x, &y)| f.value(y) - f.value(x)), size, p);
        worst = worst.max(d);
    }
    Ok(worst)
}
