use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{lp_norm_of, Exponent, ModulusProfile};
use crate::error::{Error, Result};
use crate::format_decimal;
use crate::group::Basis;
use crate::means::Summation;
use crate::tolerance;
use crate::transform::{fast_forward_transform, CylinderFunction, Spectrum};
use crate::weights::NorlundWeights;

/// The approximation estimates checked by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// Fejér means, explicit constant `R^2`.
    Fejer,
    /// Non-decreasing regular weights, explicit constants `3R^3` and `2R^3`.
    One,
    /// Non-increasing weights at `n = M_k`, one unspecified constant.
    Two,
    /// Non-increasing weights with `1/Q_n = O(1/n)`, one unspecified constant.
    Three,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Fejer, Theorem::One, Theorem::Two, Theorem::Three];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Fejer => "fejer",
            Theorem::One => "1",
            Theorem::Two => "2",
            Theorem::Three => "3",
        }
    }

    /// Whether the bound has explicit constants (pass means `ratio <= 1`)
    /// rather than an empirical constant checked against a cap.
    pub fn is_explicit(self) -> bool {
        matches!(self, Theorem::Fejer | Theorem::One)
    }

    /// Cap on the empirical constant: `32 R^3`.
    pub fn constant_cap(basis: &Basis) -> f64 {
        tolerance::EMPIRICAL_C_CAP * (basis.r_sup() as f64).powi(3)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fejer" | "0" => Ok(Theorem::Fejer),
            "1" => Ok(Theorem::One),
            "2" => Ok(Theorem::Two),
            "3" => Ok(Theorem::Three),
            other => Err(Error::Parse(other.to_string())),
        }
    }
}

impl Serialize for Theorem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub basis: String,
    pub weights: String,
    pub p: Exponent,
    pub alpha: Option<f64>,
    pub n: usize,
    /// `||t_n f - f||_p` as computed.
    pub lhs: f64,
    /// Full right-hand side, or the explicit-constant term for Theorem 2.
    pub rhs_or_term1: f64,
    /// The sum multiplying the unspecified constant (Theorems 2 and 3).
    pub term2: Option<f64>,
    /// `lhs / rhs` for explicit bounds, the empirical constant otherwise.
    pub ratio_or_c: f64,
    pub pass: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "theorem,basis,weights,p,alpha,n,lhs,rhs_or_term1,term2,ratio_or_C,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.theorem,
            self.basis,
            self.weights,
            self.p,
            self.alpha.map(|a| a.to_string()).unwrap_or_default(),
            self.n,
            format_decimal(self.lhs),
            format_decimal(self.rhs_or_term1),
            self.term2.map(format_decimal).unwrap_or_default(),
            format_decimal(self.ratio_or_c),
            self.pass,
        )
    }
}

/// `a / b` with `0/0 = 0` and `a/0 = inf`.
fn safe_ratio(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if b <= 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Checks the weight hypotheses of `theorem` over `1..=n_max`.
pub fn check_admissible(theorem: Theorem, weights: &NorlundWeights, n_max: usize) -> Result<()> {
    match theorem {
        Theorem::Fejer => Ok(()),
        Theorem::One => {
            if !weights.is_non_decreasing() {
                return Err(Error::WrongMonotonicity {
                    expected: "non-decreasing",
                    found: weights.monotone_class().as_str(),
                });
            }
            weights.ensure_len(n_max)?;
            let trend = weights.regularity_over(n_max);
            if !trend.holds {
                return Err(Error::NotRegular {
                    end: trend.end_value,
                    n_max: trend.n_max,
                });
            }
            Ok(())
        }
        Theorem::Two | Theorem::Three => {
            if !weights.is_non_increasing() {
                return Err(Error::WrongMonotonicity {
                    expected: "non-increasing",
                    found: weights.monotone_class().as_str(),
                });
            }
            weights.ensure_len(n_max)?;
            if theorem == Theorem::Three {
                let trend = weights.cond_over(n_max);
                if !trend.holds {
                    return Err(Error::FailsCondition {
                        start: trend.probe_value,
                        end: trend.end_value,
                        n_max: trend.n_max,
                    });
                }
            }
            Ok(())
        }
    }
}

/// A test function with its coefficients and modulus profiles precomputed,
/// shared by every bound evaluated on it.
#[derive(Debug, Clone)]
pub struct BoundContext {
    function: CylinderFunction,
    spectrum: Spectrum,
    profiles: Vec<ModulusProfile>,
    noise: f64,
    alpha: Option<f64>,
}

impl BoundContext {
    /// The bounds are stated for `1 <= p < inf`.
    pub fn new(f: &CylinderFunction, exponents: &[Exponent]) -> Result<Self> {
        if let Some(p) = exponents.iter().find(|p| p.is_infinite()) {
            return Err(Error::InvalidExponent(p.value()));
        }
        Ok(Self {
            function: f.clone(),
            spectrum: fast_forward_transform(f),
            profiles: ModulusProfile::compute_many(f, exponents),
            noise: tolerance::ROUNDOFF * f.sup_norm().max(1.0),
            alpha: None,
        })
    }

    /// Records the nominal smoothness printed in report rows.
    pub fn with_alpha(mut self, alpha: Option<f64>) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn function(&self) -> &CylinderFunction {
        &self.function
    }

    pub fn basis(&self) -> &Basis {
        self.function.basis()
    }

    pub fn profiles(&self) -> &[ModulusProfile] {
        &self.profiles
    }

    /// `||mean_n f - f||_p` for every configured exponent.
    pub fn errors(&self, method: Summation<'_>, n: usize) -> Result<Vec<f64>> {
        let mean = method.apply(&self.spectrum, n)?;
        let size = self.function.len();
        Ok(self
            .profiles
            .iter()
            .map(|profile| {
                lp_norm_of(
                    mean.values().iter().zip(self.function.values()).map(|(a, b)| a - b),
                    size,
                    profile.p,
                )
            })
            .collect())
    }

    /// Errors at or below the rounding floor are treated as exact zeros.
    fn effective(&self, lhs: f64) -> f64 {
        if lhs <= self.noise {
            0.0
        } else {
            lhs
        }
    }

    fn check_order(&self, n: usize) -> Result<()> {
        let size = self.basis().size();
        if n == 0 || n > size {
            return Err(Error::OutOfRange {
                what: "mean order",
                value: n,
                bound: format!("in 1..={size}"),
            });
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn report(
        &self,
        theorem: Theorem,
        weights: &str,
        p: Exponent,
        n: usize,
        lhs: f64,
        rhs_or_term1: f64,
        term2: Option<f64>,
        ratio_or_c: f64,
    ) -> BoundReport {
        let pass = if theorem.is_explicit() {
            ratio_or_c <= 1.0 + tolerance::BOUND
        } else {
            ratio_or_c <= Theorem::constant_cap(self.basis())
        };
        BoundReport {
            theorem,
            basis: self.basis().to_string(),
            weights: weights.to_string(),
            p,
            alpha: self.alpha,
            n,
            lhs,
            rhs_or_term1,
            term2,
            ratio_or_c,
            pass,
        }
    }

    /// `sum_{s<=L} (M_s/M_L) omega_s` with `L = level`.
    fn scale_sum(&self, profile: &ModulusProfile, level: usize) -> f64 {
        let basis = self.basis();
        let m_l = basis.scale(level) as f64;
        (0..=level)
            .map(|s| basis.scale(s) as f64 / m_l * profile.omega(s))
            .sum()
    }

    /// `||sigma_n f - f||_p <= R^2 sum_{s<=N} (M_s/M_N) omega_p(1/M_s, f)`,
    /// `M_N <= n < M_{N+1}`.
    pub fn fejer(&self, n: usize) -> Result<Vec<BoundReport>> {
        self.check_order(n)?;
        let basis = self.basis();
        let level = basis.level(n);
        let r2 = (basis.r_sup() as f64).powi(2);
        let errors = self.errors(Summation::Fejer, n)?;
        Ok(self
            .profiles
            .iter()
            .zip(errors)
            .map(|(profile, lhs)| {
                let rhs = r2 * self.scale_sum(profile, level);
                let ratio = safe_ratio(self.effective(lhs), rhs);
                self.report(Theorem::Fejer, "fejer", profile.p, n, lhs, rhs, None, ratio)
            })
            .collect())
    }

    /// `||t_n f - f||_p <= (3R^3/Q_n) sum_{i<N} M_i q_{n-M_i} omega_i + 2R^3 omega_N`.
    pub fn thm1(&self, weights: &NorlundWeights, n: usize) -> Result<Vec<BoundReport>> {
        self.check_order(n)?;
        let basis = self.basis();
        check_admissible(Theorem::One, weights, basis.size())?;
        let level = basis.level(n);
        let r3 = (basis.r_sup() as f64).powi(3);
        let q_n = weights.partial_sum(n);
        let errors = self.errors(Summation::Norlund(weights), n)?;
        Ok(self
            .profiles
            .iter()
            .zip(errors)
            .map(|(profile, lhs)| {
                let head: f64 = (0..level)
                    .map(|i| {
                        let m_i = basis.scale(i);
                        m_i as f64 * weights.q(n - m_i) * profile.omega(i)
                    })
                    .sum();
                let rhs = 3.0 * r3 / q_n * head + 2.0 * r3 * profile.omega(level);
                let ratio = safe_ratio(self.effective(lhs), rhs);
                self.report(Theorem::One, weights.label(), profile.p, n, lhs, rhs, None, ratio)
            })
            .collect())
    }

    /// At `n = M_k`: `term1 = 3R^2 sum_{s<=k} (M_s/M_k) omega_s` and
    /// `term2 = sum_{s<k} ((k-s) M_s/M_k) (q_{M_s}/q_{M_k}) omega_s`; the
    /// empirical constant is `max(0, lhs - term1) / term2`.
    pub fn thm2(&self, weights: &NorlundWeights, k: usize) -> Result<Vec<BoundReport>> {
        let basis = self.basis();
        if k > basis.resolution() {
            return Err(Error::OutOfRange {
                what: "scale index",
                value: k,
                bound: format!("<= N = {}", basis.resolution()),
            });
        }
        check_admissible(Theorem::Two, weights, basis.size())?;
        weights.require_positive((0..=k).map(|s| basis.scale(s)))?;
        let m_k = basis.scale(k);
        let r2 = (basis.r_sup() as f64).powi(2);
        let q_mk = weights.q(m_k);
        let errors = self.errors(Summation::Norlund(weights), m_k)?;
        Ok(self
            .profiles
            .iter()
            .zip(errors)
            .map(|(profile, lhs)| {
                let term1 = 3.0 * r2 * self.scale_sum(profile, k);
                let term2: f64 = (0..k)
                    .map(|s| {
                        let m_s = basis.scale(s);
                        (k - s) as f64 * m_s as f64 / m_k as f64 * (weights.q(m_s) / q_mk) * profile.omega(s)
                    })
                    .sum();
                let excess = (self.effective(lhs) - term1).max(0.0);
                let c = safe_ratio(excess, term2);
                self.report(
                    Theorem::Two,
                    weights.label(),
                    profile.p,
                    m_k,
                    lhs,
                    term1,
                    Some(term2),
                    c,
                )
            })
            .collect())
    }

    /// `||t_n f - f||_p <= C sum_{j<=N} (M_j/M_N) omega_j`; the empirical
    /// constant is `lhs` over the sum.
    pub fn thm3(&self, weights: &NorlundWeights, n: usize) -> Result<Vec<BoundReport>> {
        self.check_order(n)?;
        let basis = self.basis();
        check_admissible(Theorem::Three, weights, basis.size())?;
        let level = basis.level(n);
        let errors = self.errors(Summation::Norlund(weights), n)?;
        Ok(self
            .profiles
            .iter()
            .zip(errors)
            .map(|(profile, lhs)| {
                let sum = self.scale_sum(profile, level);
                let c = safe_ratio(self.effective(lhs), sum);
                self.report(Theorem::Three, weights.label(), profile.p, n, lhs, sum, Some(sum), c)
            })
            .collect())
    }

    /// Dispatches on `theorem`; for Theorem 2 `order` is the scale index.
    pub fn evaluate(
        &self,
        theorem: Theorem,
        weights: Option<&NorlundWeights>,
        order: usize,
    ) -> Result<Vec<BoundReport>> {
        let need = || weights.ok_or(Error::Inapplicable("the bound needs Nörlund weights"));
        match theorem {
            Theorem::Fejer => self.fejer(order),
            Theorem::One => self.thm1(need()?, order),
            Theorem::Two => self.thm2(need()?, order),
            Theorem::Three => self.thm3(need()?, order),
        }
    }
}

/// Evaluates `theorem` for every context and order, in parallel over cells;
/// rows come back in (context, order, exponent) order.
pub fn bound_sweep(
    contexts: &[BoundContext],
    theorem: Theorem,
    weights: Option<&NorlundWeights>,
    orders: &[usize],
) -> Result<Vec<BoundReport>> {
    if let (Some(ctx), Some(w)) = (contexts.first(), weights) {
        check_admissible(theorem, w, ctx.basis().size())?;
    }
    let cells: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|c| orders.iter().map(move |&n| (c, n)))
        .collect();
    let rows: Vec<Vec<BoundReport>> = cells
        .par_iter()
        .map(|&(c, n)| contexts[c].evaluate(theorem, weights, n))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Growth of an empirical constant along the scale grid: the maximum over
/// the last quarter of scale levels against the first quarter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    /// `(level, max constant over rows at that level)`, by level.
    pub levels: Vec<(usize, f64)>,
    pub first_quarter_max: f64,
    pub last_quarter_max: f64,
    pub holds: bool,
}

pub fn growth_check(basis: &Basis, reports: &[BoundReport]) -> GrowthCheck {
    let mut levels: Vec<(usize, f64)> = Vec::new();
    let mut by_level = std::collections::BTreeMap::new();
    for r in reports {
        let entry = by_level.entry(basis.level(r.n)).or_insert(0.0f64);
        *entry = entry.max(r.ratio_or_c);
    }
    levels.extend(by_level);
    let quarter = levels.len().div_ceil(4);
    let max_of = |xs: &[(usize, f64)]| xs.iter().map(|x| x.1).fold(0.0, f64::max);
    let first_quarter_max = max_of(&levels[..quarter]);
    let last_quarter_max = max_of(&levels[levels.len() - quarter..]);
    GrowthCheck {
        holds: last_quarter_max <= tolerance::EMPIRICAL_C_GROWTH * first_quarter_max || last_quarter_max == 0.0,
        levels,
        first_quarter_max,
        last_quarter_max,
    }
}
