use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Exponent, ModulusProfile};
use crate::error::{Error, Result};
use crate::group::Basis;
use crate::transform::{fast_inverse_transform, psi_values, CylinderFunction, Spectrum};

/// Ratio `c2/c1` a generated function may show before its band is reported
/// as failed.
const BAND_SPREAD: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LipKind {
    /// `Re sum_{s<N} M_s^{-alpha} psi_{M_s}`.
    Lacunary,
    /// `rho(x)^alpha` with `rho(x) = sum_j x_j / M_{j+1}`.
    Radial,
    /// `Re sum_{s<N} M_s^{-alpha} c_s psi_{k_s}` with `k_s` drawn from
    /// `[M_s, M_{s+1})` and `c_s` a random sign.
    RandomLacunary,
}

impl LipKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LipKind::Lacunary => "lacunary",
            LipKind::Radial => "radial",
            LipKind::RandomLacunary => "random-lacunary",
        }
    }
}

impl fmt::Display for LipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LipKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lacunary" => Ok(LipKind::Lacunary),
            "radial" => Ok(LipKind::Radial),
            "random-lacunary" => Ok(LipKind::RandomLacunary),
            other => Err(Error::Parse(other.to_string())),
        }
    }
}

/// A Lipschitz test family: generator, smoothness and the exponent at which
/// the modulus band is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipSpec {
    pub kind: LipKind,
    pub alpha: f64,
    pub p: Exponent,
}

impl LipSpec {
    pub fn new(kind: LipKind, alpha: f64, p: Exponent) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { kind, alpha, p })
    }
}

/// Measured constants in `c1 M_s^{-alpha} <= omega_p(1/M_s, f) <= c2 M_s^{-alpha}`
/// over `s_min..=s_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipBand {
    pub c1: f64,
    pub c2: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub holds: bool,
}

impl LipBand {
    /// Band over `s < N`; `omega_p(1/M_N, f)` vanishes for every cylinder
    /// function and carries no information.
    pub fn measure(basis: &Basis, profile: &ModulusProfile, alpha: f64) -> Self {
        let s_max = basis.resolution().saturating_sub(1);
        let (c1, c2) = (0..=s_max)
            .map(|s| profile.omega(s) * (basis.scale(s) as f64).powf(alpha))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(c), hi.max(c)));
        Self {
            c1,
            c2,
            s_min: 0,
            s_max,
            holds: c1 > 0.0 && c2 <= BAND_SPREAD * c1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LipFunction {
    pub spec: LipSpec,
    pub function: CylinderFunction,
    pub profile: ModulusProfile,
    pub band: LipBand,
}

fn lacunary(basis: &Basis, alpha: f64, terms: &[(usize, Complex64)]) -> CylinderFunction {
    let mut values = vec![Complex64::new(0.0, 0.0); basis.size()];
    for (s, &(k, c)) in terms.iter().enumerate() {
        let amp = (basis.scale(s) as f64).powf(-alpha);
        let psi = psi_values(basis, k).expect("k < M_N");
        for (v, p) in values.iter_mut().zip(psi) {
            *v += (c * p).re * amp;
        }
    }
    CylinderFunction::new(basis, values).expect("finite values")
}

fn random_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// One character per block `[M_s, M_{s+1})` with a random sign; a sign
/// rather than a phase keeps `|Re c_s|` at one on bases whose characters
/// are real.
fn random_lacunary_terms(basis: &Basis, rng: &mut ChaCha8Rng) -> Vec<(usize, Complex64)> {
    (0..basis.resolution())
        .map(|s| {
            let k = rng.gen_range(basis.scale(s)..basis.scale(s + 1));
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (k, Complex64::new(sign, 0.0))
        })
        .collect()
}

/// `rho(x) = sum_j x_j / M_{j+1}`, the natural map of `G_m` onto `[0, 1)`.
fn radial_coordinate(basis: &Basis, i: usize) -> f64 {
    basis
        .digits_of(i)
        .iter()
        .enumerate()
        .map(|(j, &d)| d as f64 / basis.scale(j + 1) as f64)
        .sum()
}

fn radial(basis: &Basis, alpha: f64) -> CylinderFunction {
    CylinderFunction::from_fn(basis, |i| Complex64::new(radial_coordinate(basis, i).powf(alpha), 0.0))
}

/// Generates a member of the requested family and attaches its measured
/// modulus profile and band. The seed only affects [`LipKind::RandomLacunary`].
pub fn lip_generator(spec: &LipSpec, basis: &Basis, seed: u64) -> Result<LipFunction> {
    let spec = LipSpec::new(spec.kind, spec.alpha, spec.p)?;
    let function = match spec.kind {
        LipKind::Lacunary => {
            let terms: Vec<_> = (0..basis.resolution())
                .map(|s| (basis.scale(s), Complex64::new(1.0, 0.0)))
                .collect();
            lacunary(basis, spec.alpha, &terms)
        }
        LipKind::RandomLacunary => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            lacunary(basis, spec.alpha, &random_lacunary_terms(basis, &mut rng))
        }
        LipKind::Radial => radial(basis, spec.alpha),
    };
    let profile = ModulusProfile::compute(&function, spec.p);
    let band = LipBand::measure(basis, &profile, spec.alpha);
    Ok(LipFunction {
        spec,
        function,
        profile,
        band,
    })
}

/// One seeded test function of the approximation corpus.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub label: String,
    /// Nominal smoothness for the Lipschitz families.
    pub alpha: Option<f64>,
    pub function: CylinderFunction,
}

const CORPUS_ALPHAS: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];

fn corpus_member(basis: &Basis, index: usize, rng: &mut ChaCha8Rng) -> CorpusEntry {
    let size = basis.size();
    let alpha = CORPUS_ALPHAS[(index / 7) % CORPUS_ALPHAS.len()];
    match index % 7 {
        0 => CorpusEntry {
            label: format!("random-lacunary(alpha={alpha})"),
            alpha: Some(alpha),
            function: lacunary(basis, alpha, &random_lacunary_terms(basis, rng)),
        },
        1 => {
            let terms: Vec<(usize, Complex64)> = random_lacunary_terms(basis, rng)
                .into_iter()
                .map(|(k, _)| (k, random_phase(rng)))
                .collect();
            let mut values = vec![Complex64::new(0.0, 0.0); size];
            for (s, (k, c)) in terms.into_iter().enumerate() {
                let amp = (basis.scale(s) as f64).powf(-alpha);
                for (v, p) in values.iter_mut().zip(psi_values(basis, k).expect("k < M_N")) {
                    *v += c * p * amp;
                }
            }
            CorpusEntry {
                label: format!("complex-lacunary(alpha={alpha})"),
                alpha: Some(alpha),
                function: CylinderFunction::new(basis, values).expect("finite values"),
            }
        }
        2 => {
            let shift = rng.gen_range(0..size);
            let map = basis.translation_map(shift);
            let base = radial(basis, alpha);
            CorpusEntry {
                label: format!("radial(alpha={alpha},shift={shift})"),
                alpha: Some(alpha),
                function: CylinderFunction::from_fn(basis, |x| base.value(map[x])),
            }
        }
        3 => {
            let beta = rng.gen_range(0.5..2.5);
            let coeffs = (0..size)
                .map(|k| random_phase(rng) * rng.gen_range(0.0..1.0) * ((k + 1) as f64).powf(-beta))
                .collect();
            let spectrum = Spectrum::new(basis, coeffs).expect("finite coefficients");
            CorpusEntry {
                label: format!("decaying-spectrum(beta={beta:.3})"),
                alpha: None,
                function: fast_inverse_transform(&spectrum),
            }
        }
        4 => {
            let level = rng.gen_range(1..=basis.resolution());
            let block = basis.scale(level);
            // Cosets of I_level are the labels sharing their low `level` digits.
            let steps: Vec<f64> = (0..block).map(|_| rng.gen_range(-1.0..1.0)).collect();
            CorpusEntry {
                label: format!("step(level={level})"),
                alpha: None,
                function: CylinderFunction::from_fn(basis, |x| Complex64::new(steps[x % block], 0.0)),
            }
        }
        5 => {
            let n = rng.gen_range(1..size);
            CorpusEntry {
                label: format!("character({n})"),
                alpha: None,
                function: CylinderFunction::character(basis, n).expect("n < M_N"),
            }
        }
        _ => CorpusEntry {
            label: "noise".to_string(),
            alpha: None,
            function: CylinderFunction::from_fn(basis, |_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)),
        },
    }
}

/// `count` seeded, non-constant functions cycling through the families
/// random-lacunary, complex-lacunary, shifted radial, decaying random
/// spectrum, cylinder steps, single characters and white noise.
///
/// Entry `i` depends only on `(basis, seed, i)`.
pub fn corpus(basis: &Basis, seed: u64, count: usize) -> Vec<CorpusEntry> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            loop {
                let entry = corpus_member(basis, i, &mut rng);
                if entry.function.oscillation() > 1e-8 {
                    break entry;
                }
            }
        })
        .collect()
}
