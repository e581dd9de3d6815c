//! Nörlund weight sequences `q_k` with partial sums `Q_n = sum_{k<n} q_k`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Monotonicity of a weight sequence, detected by scanning it.
///
/// Constant sequences are both non-decreasing and non-increasing; they are
/// labelled [`MonotoneClass::NonDecreasing`] and flagged through
/// [`NorlundWeights::is_fejer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneClass {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

impl MonotoneClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MonotoneClass::NonDecreasing => "non-decreasing",
            MonotoneClass::NonIncreasing => "non-increasing",
            MonotoneClass::Neither => "non-monotone",
        }
    }
}

impl fmt::Display for MonotoneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generator description for a weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `q_k = 1`; the Nörlund mean is the Fejér mean.
    Constant,
    /// `q_k = (k + 1)^beta`.
    Power(f64),
    /// `q_k = ln(k + 2)`.
    Log,
    /// `q_k = r^k`, `0 < r < 1`.
    Geometric(f64),
    /// Explicit values.
    Custom(Vec<f64>),
}

impl WeightSpec {
    /// The class the generator guarantees, if any.
    pub fn declared_class(&self) -> Option<MonotoneClass> {
        match self {
            WeightSpec::Constant | WeightSpec::Log => Some(MonotoneClass::NonDecreasing),
            WeightSpec::Power(beta) if *beta >= 0.0 => Some(MonotoneClass::NonDecreasing),
            WeightSpec::Power(_) | WeightSpec::Geometric(_) => Some(MonotoneClass::NonIncreasing),
            WeightSpec::Custom(_) => None,
        }
    }

    /// Materializes `q_0..q_{len-1}` (custom lists keep their full length).
    pub fn build(&self, len: usize) -> Result<NorlundWeights> {
        let q: Vec<f64> = match self {
            WeightSpec::Constant => vec![1.0; len],
            WeightSpec::Power(beta) => {
                if !beta.is_finite() {
                    return Err(Error::InvalidWeights(format!("power exponent {beta}")));
                }
                (0..len).map(|k| ((k + 1) as f64).powf(*beta)).collect()
            }
            WeightSpec::Log => (0..len).map(|k| ((k + 2) as f64).ln()).collect(),
            WeightSpec::Geometric(r) => {
                if !(*r > 0.0 && *r < 1.0) {
                    return Err(Error::InvalidWeights(format!("geometric ratio {r} outside (0, 1)")));
                }
                let mut q = Vec::with_capacity(len);
                let mut v = 1.0;
                for _ in 0..len {
                    q.push(v);
                    v *= r;
                }
                q
            }
            WeightSpec::Custom(values) => {
                if values.len() < len {
                    return Err(Error::InvalidWeights(format!(
                        "{} values supplied, {len} needed",
                        values.len()
                    )));
                }
                values.clone()
            }
        };
        NorlundWeights::from_values(self.to_string(), q)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant => f.write_str("constant"),
            WeightSpec::Power(beta) => write!(f, "power:{beta}"),
            WeightSpec::Log => f.write_str("log"),
            WeightSpec::Geometric(r) => write!(f, "geom:{r}"),
            WeightSpec::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Parses `constant`, `power:<beta>`, `log` or `geom:<r>`.
///
/// File-backed weights are read by the caller and passed as
/// [`WeightSpec::Custom`].
impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(s.to_string()))
        };
        match s {
            "constant" => Ok(WeightSpec::Constant),
            "log" => Ok(WeightSpec::Log),
            _ => {
                if let Some(beta) = s.strip_prefix("power:") {
                    Ok(WeightSpec::Power(number(beta)?))
                } else if let Some(r) = s.strip_prefix("geom:") {
                    let r = number(r)?;
                    if r > 0.0 && r < 1.0 {
                        Ok(WeightSpec::Geometric(r))
                    } else {
                        Err(Error::InvalidWeights(format!("geometric ratio {r} outside (0, 1)")))
                    }
                } else {
                    Err(Error::Parse(s.to_string()))
                }
            }
        }
    }
}

/// Parses one non-negative decimal per line; blank lines are skipped.
pub fn parse_weight_list(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|_| Error::InvalidWeights(format!("line {}: `{l}` is not a number", i + 1)))
        })
        .collect()
}

/// Outcome of an empirical trend check over `1..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendDiagnostic {
    /// `ceil(sqrt(n_max))`, the reference point of the check.
    pub n_probe: usize,
    pub n_max: usize,
    pub probe_value: f64,
    pub end_value: f64,
    pub holds: bool,
}

/// A materialized Nörlund weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NorlundWeights {
    label: String,
    q: Vec<f64>,
    // partial[n] = Q_n
    partial: Vec<f64>,
    class: MonotoneClass,
    is_fejer: bool,
}

impl NorlundWeights {
    /// Validates `q` (finite, non-negative, `q_0 > 0`) and classifies it.
    pub fn from_values(label: impl Into<String>, q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidWeights("empty sequence".into()));
        }
        if let Some((k, v)) = q.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "q_{k} = {v} is not a non-negative number"
            )));
        }
        if q[0] <= 0.0 {
            return Err(Error::InvalidWeights("q_0 must be positive".into()));
        }
        let mut partial = Vec::with_capacity(q.len() + 1);
        let mut acc = 0.0;
        partial.push(acc);
        for &v in &q {
            acc += v;
            partial.push(acc);
        }
        let non_decreasing = q.windows(2).all(|w| w[1] >= w[0]);
        let non_increasing = q.windows(2).all(|w| w[1] <= w[0]);
        let class = if non_decreasing {
            MonotoneClass::NonDecreasing
        } else if non_increasing {
            MonotoneClass::NonIncreasing
        } else {
            MonotoneClass::Neither
        };
        Ok(Self {
            label: label.into(),
            q,
            partial,
            class,
            is_fejer: non_decreasing && non_increasing,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of stored weights.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q[k]
    }

    /// `Q_n` for `n <= len`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial[n]
    }

    pub fn monotone_class(&self) -> MonotoneClass {
        self.class
    }

    /// Constant sequence: the Nörlund mean is the Fejér mean.
    pub fn is_fejer(&self) -> bool {
        self.is_fejer
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.class == MonotoneClass::NonDecreasing
    }

    pub fn is_non_increasing(&self) -> bool {
        self.class == MonotoneClass::NonIncreasing || self.is_fejer
    }

    pub(crate) fn ensure_len(&self, n: usize) -> Result<()> {
        if n > self.q.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights stored, index {n} requested",
                self.q.len()
            )));
        }
        Ok(())
    }

    /// `q_{n-1} / Q_n`; tends to zero exactly for regular methods.
    pub fn regularity_ratio(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.q.len(), "n = {n} outside 1..={}", self.q.len());
        self.q[n - 1] / self.partial[n]
    }

    /// `n / Q_n`; bounded exactly when `1/Q_n = O(1/n)`.
    pub fn cond_ratio(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.q.len(), "n = {n} outside 1..={}", self.q.len());
        n as f64 / self.partial[n]
    }

    /// `n^{gamma-1} / Q_n^gamma * sum_{k<n} q_k^gamma`, a diagnostic only.
    pub fn power_condition_quantity(&self, n: usize, gamma: f64) -> Result<f64> {
        if !(gamma > 1.0 && gamma <= 2.0) {
            return Err(Error::InvalidGamma(gamma));
        }
        self.ensure_len(n)?;
        if n == 0 {
            return Err(Error::ZeroPartialSum(0));
        }
        let power_sum: f64 = self.q[..n].iter().map(|q| q.powf(gamma)).sum();
        let nf = n as f64;
        Ok(nf.powf(gamma - 1.0) / self.partial[n].powf(gamma) * power_sum)
    }

    /// Right-hand side of the Abel rearrangement
    /// `Q_n = sum_{j=1}^{n-1} (q_{n-j} - q_{n-j-1}) j + q_0 n`.
    pub fn abel_partial_sum(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.q.len());
        let mut acc = 0.0;
        for j in 1..n {
            acc += (self.q[n - j] - self.q[n - j - 1]) * j as f64;
        }
        acc + self.q[0] * n as f64
    }

    fn probe(n_max: usize) -> usize {
        ((n_max as f64).sqrt().ceil() as usize).max(1)
    }

    /// Regularity over `1..=n_max`: `q_{n-1}/Q_n` at `n_max` must be at most
    /// half its value at `ceil(sqrt(n_max))`.
    pub fn regularity_over(&self, n_max: usize) -> TrendDiagnostic {
        let n_max = n_max.min(self.q.len()).max(1);
        let n_probe = Self::probe(n_max);
        let probe_value = self.regularity_ratio(n_probe);
        let end_value = self.regularity_ratio(n_max);
        TrendDiagnostic {
            n_probe,
            n_max,
            probe_value,
            end_value,
            holds: end_value <= 0.5 * probe_value,
        }
    }

    /// `1/Q_n = O(1/n)` over `1..=n_max`: `n/Q_n` at `n_max` must stay within
    /// twice its maximum over `n <= ceil(sqrt(n_max))`.
    pub fn cond_over(&self, n_max: usize) -> TrendDiagnostic {
        let n_max = n_max.min(self.q.len()).max(1);
        let n_probe = Self::probe(n_max);
        let probe_value = (1..=n_probe).map(|n| self.cond_ratio(n)).fold(0.0, f64::max);
        let end_value = self.cond_ratio(n_max);
        TrendDiagnostic {
            n_probe,
            n_max,
            probe_value,
            end_value,
            holds: end_value <= 2.0 * probe_value,
        }
    }

    /// Errors with [`Error::ZeroWeight`] if any listed `q_k` vanishes.
    pub fn require_positive(&self, indices: impl IntoIterator<Item = usize>) -> Result<()> {
        for k in indices {
            self.ensure_len(k + 1)?;
            if self.q[k] <= 0.0 {
                return Err(Error::ZeroWeight(k));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_family() {
        let w = WeightSpec::Constant.build(64).unwrap();
        assert_eq!(w.monotone_class(), MonotoneClass::NonDecreasing);
        assert!(w.is_fejer() && w.is_non_increasing() && w.is_non_decreasing());
        for n in 1..=64 {
            assert_eq!(w.partial_sum(n), n as f64);
            assert_relative_eq!(w.regularity_ratio(n), 1.0 / n as f64);
            assert_eq!(w.cond_ratio(n), 1.0);
            for gamma in [1.25, 1.5, 2.0] {
                assert_relative_eq!(w.power_condition_quantity(n, gamma).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn power_one_family() {
        let w = WeightSpec::Power(1.0).build(200).unwrap();
        assert_eq!(w.q(0), 1.0);
        assert_eq!(w.q(9), 10.0);
        for n in 1..=200 {
            let nf = n as f64;
            assert_eq!(w.partial_sum(n), nf * (nf + 1.0) / 2.0);
            assert_relative_eq!(w.regularity_ratio(n), 2.0 / (nf + 1.0), max_relative = 1e-14);
        }
        assert!(!w.is_fejer());
    }

    #[test]
    fn geometric_family() {
        let w = WeightSpec::Geometric(0.5).build(40).unwrap();
        assert_eq!(w.monotone_class(), MonotoneClass::NonIncreasing);
        for n in 1..=40 {
            assert_relative_eq!(
                w.partial_sum(n),
                2.0 * (1.0 - 0.5f64.powi(n as i32)),
                max_relative = 1e-15
            );
        }
        // Direct evaluation q_19 / Q_20.
        let direct = 0.5f64.powi(19) / (2.0 * (1.0 - 0.5f64.powi(20)));
        assert_relative_eq!(w.regularity_ratio(20), direct, max_relative = 1e-14);
        assert!(w.regularity_ratio(20) < 1e-5);
        assert!(!w.cond_over(40).holds);
    }

    #[test]
    fn harmonic_weights_fail_cond() {
        let w = WeightSpec::Power(-1.0).build(1024).unwrap();
        assert_eq!(w.monotone_class(), MonotoneClass::NonIncreasing);
        // Harmonic partial sums, summed independently.
        let h: f64 = (1..=1024).map(|k| 1.0 / k as f64).sum();
        assert_relative_eq!(w.cond_ratio(1024), 1024.0 / h, max_relative = 1e-12);
        let diag = w.cond_over(1024);
        assert!(!diag.holds, "{diag:?}");
        assert!(w.regularity_over(1024).holds);
    }

    #[test]
    fn cond_holds_for_bounded_below_weights() {
        let q: Vec<f64> = (0..1024).map(|k| 1.0 + 1.0 / (k as f64 + 1.0)).collect();
        let w = NorlundWeights::from_values("shifted-harmonic", q).unwrap();
        assert_eq!(w.monotone_class(), MonotoneClass::NonIncreasing);
        assert!(w.cond_over(1024).holds);
        assert!(WeightSpec::Constant.build(1024).unwrap().cond_over(1024).holds);
    }

    #[test]
    fn regularity_detects_exponential_growth() {
        let q: Vec<f64> = (0..256).map(|k| 2f64.powi(k)).collect();
        let w = NorlundWeights::from_values("exp", q).unwrap();
        assert!(!w.regularity_over(256).holds);
        for spec in [WeightSpec::Constant, WeightSpec::Power(1.0), WeightSpec::Log] {
            assert!(spec.build(1024).unwrap().regularity_over(1024).holds, "{spec}");
        }
    }

    #[test]
    fn power_condition_examples() {
        // q_k = k + 1, gamma = 2, n = 100 by direct summation.
        let w = WeightSpec::Power(1.0).build(100).unwrap();
        let squares: f64 = (1..=100).map(|k| (k * k) as f64).sum();
        let q100 = 5050.0f64;
        assert_relative_eq!(
            w.power_condition_quantity(100, 2.0).unwrap(),
            100.0 * squares / (q100 * q100),
            max_relative = 1e-14
        );
        // q_k = 2^-k: the quantity grows roughly like n / 3.
        let w = WeightSpec::Geometric(0.5).build(40).unwrap();
        let direct = |n: usize| {
            let q: f64 = (0..n).map(|k| 0.5f64.powi(k as i32)).sum();
            let q2: f64 = (0..n).map(|k| 0.25f64.powi(k as i32)).sum();
            n as f64 * q2 / (q * q)
        };
        assert_relative_eq!(
            w.power_condition_quantity(20, 2.0).unwrap(),
            direct(20),
            max_relative = 1e-14
        );
        assert!(w.power_condition_quantity(40, 2.0).unwrap() > 1.9 * w.power_condition_quantity(20, 2.0).unwrap());
        assert!(w.power_condition_quantity(10, 1.0).is_err());
        assert!(w.power_condition_quantity(10, 2.5).is_err());
    }

    #[test]
    fn abel_identity_for_geometric_weights() {
        let w = WeightSpec::Geometric(0.5).build(10).unwrap();
        let direct: f64 = (0..10).map(|k| 0.5f64.powi(k)).sum();
        assert_relative_eq!(w.abel_partial_sum(10), direct, max_relative = 1e-14);
        assert_relative_eq!(w.partial_sum(10), direct, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(NorlundWeights::from_values("z", vec![0.0, 1.0]).is_err());
        assert!(NorlundWeights::from_values("n", vec![1.0, -1.0]).is_err());
        assert!(NorlundWeights::from_values("e", vec![]).is_err());
        assert!(WeightSpec::Custom(vec![1.0; 3]).build(4).is_err());
        assert!(WeightSpec::Geometric(1.5).build(4).is_err());
        let w = NorlundWeights::from_values("gap", vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(w.require_positive([0, 2]), Err(Error::ZeroWeight(2)));
    }

    #[test]
    fn parses_specs() {
        assert_eq!("constant".parse::<WeightSpec>().unwrap(), WeightSpec::Constant);
        assert_eq!("power:-1".parse::<WeightSpec>().unwrap(), WeightSpec::Power(-1.0));
        assert_eq!("log".parse::<WeightSpec>().unwrap(), WeightSpec::Log);
        assert_eq!("geom:0.5".parse::<WeightSpec>().unwrap(), WeightSpec::Geometric(0.5));
        assert!("geom:2".parse::<WeightSpec>().is_err());
        assert!("power:x".parse::<WeightSpec>().is_err());
        assert!("cubic".parse::<WeightSpec>().is_err());
        assert_eq!(WeightSpec::Power(1.0).to_string(), "power:1");
        assert_eq!(parse_weight_list("1\n 0.5\n\n0.25\n").unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(parse_weight_list("1\nabc\n").is_err());
    }

    #[test]
    fn scan_agrees_with_declared_class() {
        let specs = [
            WeightSpec::Constant,
            WeightSpec::Power(1.0),
            WeightSpec::Power(0.5),
            WeightSpec::Power(-0.5),
            WeightSpec::Power(-1.0),
            WeightSpec::Log,
            WeightSpec::Geometric(0.5),
            WeightSpec::Geometric(0.9),
        ];
        for spec in specs {
            let w = spec.build(2048).unwrap();
            assert_eq!(Some(w.monotone_class()), spec.declared_class(), "{spec}");
        }
    }
}
