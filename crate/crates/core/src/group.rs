//! Mixed-radix arithmetic on the bounded Vilenkin group at finite resolution.
//!
//! A [`Basis`] fixes the radices `m_0..m_{N-1}` and the scales
//! `M_0 = 1, M_{k+1} = m_k M_k`. Everything downstream works on the
//! `M_N` cosets of the subgroup `I_N`; coset `i` is labelled by its
//! little-endian mixed-radix expansion `i = sum_k x_k M_k`.
//!
//! Labels are only labels: adding two coset labels as integers is *not* the
//! group operation. Use [`Basis::add_index`] or [`GroupPoint`] arithmetic.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radix sequence, scales and unit-root tables of a truncated Vilenkin group.
///
/// Cheap to clone; the tables are shared.
#[derive(Clone)]
pub struct Basis {
    inner: Arc<BasisInner>,
}

struct BasisInner {
    radices: Vec<usize>,
    scales: Vec<usize>,
    r_sup: usize,
    // roots[k][d] = exp(2 pi i d / m_k), each evaluated from its exact angle.
    roots: Vec<Vec<Complex64>>,
}

impl Basis {
    /// Builds the basis that keeps every radix in `radices`.
    pub fn new(radices: &[usize]) -> Result<Self> {
        Self::with_resolution(radices, radices.len())
    }

    /// Builds the basis from the first `resolution` radices.
    pub fn with_resolution(radices: &[usize], resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidBasis("resolution N must be at least 1".into()));
        }
        if resolution > radices.len() {
            return Err(Error::InvalidBasis(format!(
                "resolution {resolution} exceeds the {} radices supplied",
                radices.len()
            )));
        }
        let radices = radices[..resolution].to_vec();
        if let Some((k, &m)) = radices.iter().enumerate().find(|(_, &m)| m < 2) {
            return Err(Error::InvalidBasis(format!("radix m_{k} = {m} is below 2")));
        }
        let mut scales = Vec::with_capacity(resolution + 1);
        scales.push(1usize);
        for &m in &radices {
            let last = *scales.last().unwrap();
            let next = last
                .checked_mul(m)
                .ok_or_else(|| Error::Capacity(format!("M_N overflows usize for radices {radices:?}")))?;
            scales.push(next);
        }
        let r_sup = radices.iter().copied().max().unwrap();
        let roots = radices
            .iter()
            .map(|&m| {
                (0..m)
                    .map(|d| Complex64::from_polar(1.0, TAU * d as f64 / m as f64))
                    .collect()
            })
            .collect();
        Ok(Self {
            inner: Arc::new(BasisInner {
                radices,
                scales,
                r_sup,
                roots,
            }),
        })
    }

    /// `N`, the number of retained coordinates.
    pub fn resolution(&self) -> usize {
        self.inner.radices.len()
    }

    pub fn radices(&self) -> &[usize] {
        &self.inner.radices
    }

    pub fn radix(&self, k: usize) -> usize {
        self.inner.radices[k]
    }

    /// `M_0..=M_N`.
    pub fn scales(&self) -> &[usize] {
        &self.inner.scales
    }

    /// `M_k` for `0 <= k <= N`.
    pub fn scale(&self, k: usize) -> usize {
        self.inner.scales[k]
    }

    /// `M_N`, the number of cosets of `I_N`.
    pub fn size(&self) -> usize {
        *self.inner.scales.last().unwrap()
    }

    /// `R`, the largest radix.
    pub fn r_sup(&self) -> usize {
        self.inner.r_sup
    }

    /// `exp(2 pi i d / m_k)`.
    pub fn unit_root(&self, k: usize, d: usize) -> Complex64 {
        let roots = &self.inner.roots[k];
        roots[d % roots.len()]
    }

    pub(crate) fn roots(&self, k: usize) -> &[Complex64] {
        &self.inner.roots[k]
    }

    /// The largest `j` with `M_j <= n`, i.e. the order `|n|` of the leading
    /// digit. Defined as 0 for `n <= 1`; saturates at `N` for `n >= M_N`.
    pub fn level(&self, n: usize) -> usize {
        let scales = &self.inner.scales;
        scales.partition_point(|&m| m <= n).saturating_sub(1)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.size() {
            return Err(Error::OutOfRange {
                what: "coset index",
                value: i,
                bound: format!("< M_N = {}", self.size()),
            });
        }
        Ok(())
    }

    /// Little-endian mixed-radix digits of `i < M_N`.
    pub fn digits_of(&self, mut i: usize) -> Vec<usize> {
        debug_assert!(i < self.size());
        self.inner
            .radices
            .iter()
            .map(|&m| {
                let d = i % m;
                i /= m;
                d
            })
            .collect()
    }

    /// Inverse of [`Basis::digits_of`]; digits are assumed in range.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.inner.scales).map(|(&d, &s)| d * s).sum()
    }

    /// Label of `x + y` for coset labels `x`, `y`.
    pub fn add_index(&self, mut x: usize, mut y: usize) -> usize {
        let mut out = 0;
        for (&m, &s) in self.inner.radices.iter().zip(&self.inner.scales) {
            let d = (x % m + y % m) % m;
            out += d * s;
            x /= m;
            y /= m;
        }
        out
    }

    /// Label of `-x`.
    pub fn neg_index(&self, mut x: usize) -> usize {
        let mut out = 0;
        for (&m, &s) in self.inner.radices.iter().zip(&self.inner.scales) {
            let d = (m - x % m) % m;
            out += d * s;
            x /= m;
        }
        out
    }

    /// Label of `x - y`.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        self.add_index(x, self.neg_index(y))
    }

    /// Table `map[x] = label(x + t)` for every coset `x`, built with an
    /// odometer in `O(M_N)` amortized steps.
    pub fn translation_map(&self, t: usize) -> Vec<usize> {
        let size = self.size();
        let radices = &self.inner.radices;
        let scales = &self.inner.scales;
        let mut x = vec![0usize; radices.len()];
        let mut y = self.digits_of(t % size);
        let mut label = t % size;
        let mut out = Vec::with_capacity(size);
        out.push(label);
        for _ in 1..size {
            // Every odometer digit change, including the wrap m-1 -> 0, is +1
            // modulo m_j, so x + t moves by +1 in the same coordinate.
            let mut j = 0;
            loop {
                let m = radices[j];
                if y[j] + 1 == m {
                    y[j] = 0;
                    label -= (m - 1) * scales[j];
                } else {
                    y[j] += 1;
                    label += scales[j];
                }
                x[j] += 1;
                if x[j] == m {
                    x[j] = 0;
                    j += 1;
                } else {
                    break;
                }
            }
            out.push(label);
        }
        out
    }

    /// The point labelled `i`.
    pub fn point(&self, i: usize) -> Result<GroupPoint> {
        self.check_index(i)?;
        Ok(GroupPoint {
            basis: self.clone(),
            digits: self.digits_of(i),
        })
    }

    /// Alias of [`Basis::point`] matching the coset-enumeration vocabulary.
    pub fn index_to_point(&self, i: usize) -> Result<GroupPoint> {
        self.point(i)
    }

    /// Mixed-radix expansion of an integer `n < M_N`.
    pub fn expand_index(&self, n: usize) -> Result<IndexExpansion> {
        self.check_index(n)?;
        let digits = self.digits_of(n);
        let order = digits.iter().rposition(|&d| d != 0).unwrap_or(0);
        Ok(IndexExpansion {
            value: n,
            digits,
            order,
        })
    }

    pub fn same_as(&self, other: &Basis) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.radices == other.inner.radices
    }

    pub(crate) fn ensure_same(&self, other: &Basis) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Basis {}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("radices", &self.inner.radices)
            .field("scales", &self.inner.scales)
            .finish()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let radices = self.radices();
        if radices.iter().all(|&m| m == 2) {
            write!(f, "dyadic:{}", radices.len())
        } else if radices.iter().all(|&m| m == 3) {
            write!(f, "triadic:{}", radices.len())
        } else {
            let list: Vec<String> = radices.iter().map(|m| m.to_string()).collect();
            write!(f, "mixed:{}", list.join(","))
        }
    }
}

/// Accepts `dyadic:N`, `triadic:N`, `mixed:m0,m1,...` or a bare radix list.
impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_count = |v: &str| -> Result<usize> { v.trim().parse().map_err(|_| Error::Parse(s.to_string())) };
        let radices: Vec<usize> = if let Some(n) = s.strip_prefix("dyadic:") {
            vec![2; parse_count(n)?]
        } else if let Some(n) = s.strip_prefix("triadic:") {
            vec![3; parse_count(n)?]
        } else {
            let list = s.strip_prefix("mixed:").unwrap_or(s);
            list.split(',').map(parse_count).collect::<Result<Vec<_>>>()?
        };
        Basis::new(&radices)
    }
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    radices: Vec<usize>,
    #[serde(rename = "N")]
    n: usize,
}

impl Serialize for Basis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BasisRepr {
            radices: self.radices().to_vec(),
            n: self.resolution(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = BasisRepr::deserialize(deserializer)?;
        Basis::with_resolution(&repr.radices, repr.n).map_err(serde::de::Error::custom)
    }
}

/// A coset of `I_N`, stored as its digit vector.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupPoint {
    basis: Basis,
    digits: Vec<usize>,
}

impl GroupPoint {
    pub fn new(basis: &Basis, digits: Vec<usize>) -> Result<Self> {
        if digits.len() != basis.resolution() {
            return Err(Error::LengthMismatch {
                expected: basis.resolution(),
                found: digits.len(),
            });
        }
        for (k, (&d, &m)) in digits.iter().zip(basis.radices()).enumerate() {
            if d >= m {
                return Err(Error::OutOfRange {
                    what: "digit",
                    value: d,
                    bound: format!("< m_{k} = {m}"),
                });
            }
        }
        Ok(Self {
            basis: basis.clone(),
            digits,
        })
    }

    pub fn zero(basis: &Basis) -> Self {
        Self {
            basis: basis.clone(),
            digits: vec![0; basis.resolution()],
        }
    }

    /// `d * e_t`: digit `d` at coordinate `t`, zero elsewhere.
    pub fn unit(basis: &Basis, t: usize, d: usize) -> Result<Self> {
        let mut digits = vec![0; basis.resolution()];
        if t >= digits.len() {
            return Err(Error::OutOfRange {
                what: "coordinate",
                value: t,
                bound: format!("< N = {}", digits.len()),
            });
        }
        digits[t] = d;
        Self::new(basis, digits)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn digit(&self, k: usize) -> usize {
        self.digits[k]
    }

    pub fn index(&self) -> usize {
        self.basis.index_of(&self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Membership in `I_s`: the first `s` digits vanish.
    pub fn in_cylinder(&self, s: usize) -> bool {
        self.digits.iter().take(s).all(|&d| d == 0)
    }

    pub fn add(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.basis.ensure_same(&other.basis)?;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .zip(self.basis.radices())
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        Ok(GroupPoint {
            basis: self.basis.clone(),
            digits,
        })
    }

    pub fn negate(&self) -> GroupPoint {
        let digits = self
            .digits
            .iter()
            .zip(self.basis.radices())
            .map(|(&a, &m)| (m - a) % m)
            .collect();
        GroupPoint {
            basis: self.basis.clone(),
            digits,
        }
    }

    pub fn sub(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.add(&other.negate())
    }
}

impl fmt::Debug for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupPoint{:?}", self.digits)
    }
}

/// Digit expansion `n = sum_j n_j M_j` with its order `|n|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexExpansion {
    pub value: usize,
    pub digits: Vec<usize>,
    /// `max{j : n_j != 0}`; 0 for `n = 0`.
    pub order: usize,
}
