//! Vilenkin characters and the Vilenkin–Fourier transform.
//!
//! `psi_n(x) = prod_k r_k(x)^{n_k}` with `r_k(x) = exp(2 pi i x_k / m_k)`.
//! The dual of the truncated group is again `Z_{m_0} x ... x Z_{m_{N-1}}`,
//! so the transform is a multidimensional DFT whose axis `k` has length `m_k`
//! and stride `M_k` in the coset labelling. The fast path applies one
//! small DFT per axis; the naive path sums characters directly and serves as
//! its oracle.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format_decimal;
use crate::group::{Basis, GroupPoint};

/// Complex step function constant on the cosets of `I_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction {
    basis: Basis,
    values: Vec<Complex64>,
}

/// Vilenkin–Fourier coefficients `f^(0..M_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    basis: Basis,
    coeffs: Vec<Complex64>,
}

fn validate(basis: &Basis, values: &[Complex64]) -> Result<()> {
    if values.len() != basis.size() {
        return Err(Error::LengthMismatch {
            expected: basis.size(),
            found: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn write_csv(values: &[Complex64]) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", format_decimal(v.re), format_decimal(v.im)));
    }
    out
}

impl CylinderFunction {
    pub fn new(basis: &Basis, values: Vec<Complex64>) -> Result<Self> {
        validate(basis, &values)?;
        Ok(Self {
            basis: basis.clone(),
            values,
        })
    }

    pub fn from_real(basis: &Basis, values: &[f64]) -> Result<Self> {
        Self::new(basis, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Evaluates `f` at every coset label.
    ///
    /// Panics if `f` returns a non-finite value.
    pub fn from_fn(basis: &Basis, f: impl FnMut(usize) -> Complex64) -> Self {
        let values: Vec<Complex64> = (0..basis.size()).map(f).collect();
        validate(basis, &values).expect("from_fn produced a non-finite value");
        Self {
            basis: basis.clone(),
            values,
        }
    }

    pub fn constant(basis: &Basis, c: Complex64) -> Self {
        Self {
            basis: basis.clone(),
            values: vec![c; basis.size()],
        }
    }

    pub fn zeros(basis: &Basis) -> Self {
        Self::constant(basis, Complex64::new(0.0, 0.0))
    }

    /// The character `psi_n` as a cylinder function.
    pub fn character(basis: &Basis, n: usize) -> Result<Self> {
        Ok(Self {
            basis: basis.clone(),
            values: psi_values(basis, n)?,
        })
    }

    /// Indicator of the subgroup `I_s`.
    pub fn cylinder_indicator(basis: &Basis, s: usize) -> Result<Self> {
        if s > basis.resolution() {
            return Err(Error::OutOfRange {
                what: "cylinder level",
                value: s,
                bound: format!("<= N = {}", basis.resolution()),
            });
        }
        let step = basis.scale(s);
        Ok(Self::from_fn(basis, |i| {
            Complex64::new(if i % step == 0 { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `int f dmu`, the plain average over cosets.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.basis.ensure_same(&other.basis)?;
        Ok(Self {
            basis: self.basis.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            basis: self.basis.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        sup_abs(&self.values)
    }

    /// `max_x |f(x) - g(x)|`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_diff(&self.values, &other.values)
    }

    /// Oscillation `max f - min f` of the real and imaginary parts combined.
    pub fn oscillation(&self) -> f64 {
        let first = self.values[0];
        self.values.iter().map(|v| (v - first).norm()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        write_csv(&self.values)
    }
}

impl Spectrum {
    pub fn new(basis: &Basis, coeffs: Vec<Complex64>) -> Result<Self> {
        validate(basis, &coeffs)?;
        Ok(Self {
            basis: basis.clone(),
            coeffs,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// Multiplies coefficient `k` by `multiplier(k)`.
    pub fn apply_multiplier(&self, mut multiplier: impl FnMut(usize) -> f64) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| c * multiplier(k)).collect(),
        }
    }

    /// `sum_k |f^(k)|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_diff(&self.coeffs, &other.coeffs)
    }

    pub fn sup_norm(&self) -> f64 {
        sup_abs(&self.coeffs)
    }

    pub fn to_csv(&self) -> String {
        write_csv(&self.coeffs)
    }
}

fn check_coordinate(basis: &Basis, k: usize) -> Result<()> {
    if k >= basis.resolution() {
        return Err(Error::OutOfRange {
            what: "coordinate",
            value: k,
            bound: format!("< N = {}", basis.resolution()),
        });
    }
    Ok(())
}

fn check_character(basis: &Basis, n: usize) -> Result<()> {
    if n >= basis.size() {
        return Err(Error::OutOfRange {
            what: "character index",
            value: n,
            bound: format!("< M_N = {}", basis.size()),
        });
    }
    Ok(())
}

/// Generalized Rademacher function `r_k(x) = exp(2 pi i x_k / m_k)`.
pub fn rademacher(k: usize, x: &GroupPoint) -> Result<Complex64> {
    let basis = x.basis();
    check_coordinate(basis, k)?;
    Ok(basis.unit_root(k, x.digit(k)))
}

/// The Vilenkin character `psi_n(x)`.
pub fn vilenkin_psi(n: usize, x: &GroupPoint) -> Result<Complex64> {
    let basis = x.basis();
    check_character(basis, n)?;
    let digits = basis.digits_of(n);
    Ok(digits
        .iter()
        .zip(x.digits())
        .enumerate()
        .map(|(k, (&nk, &xk))| basis.unit_root(k, nk * xk % basis.radix(k)))
        .product())
}

/// `psi_n` evaluated at every coset label, by odometer over the digits of x.
pub fn psi_values(basis: &Basis, n: usize) -> Result<Vec<Complex64>> {
    check_character(basis, n)?;
    let size = basis.size();
    let radices = basis.radices();
    let nd = basis.digits_of(n);
    let mut x = vec![0usize; radices.len()];
    // phase[k] = n_k x_k mod m_k
    let mut phase = vec![0usize; radices.len()];
    let mut out = Vec::with_capacity(size);
    let eval = |phase: &[usize]| -> Complex64 { phase.iter().enumerate().map(|(k, &a)| basis.roots(k)[a]).product() };
    out.push(eval(&phase));
    for _ in 1..size {
        let mut j = 0;
        loop {
            let m = radices[j];
            phase[j] = (phase[j] + nd[j]) % m;
            x[j] += 1;
            if x[j] == m {
                x[j] = 0;
                j += 1;
            } else {
                break;
            }
        }
        out.push(eval(&phase));
    }
    Ok(out)
}

/// Reference transform `f^(k) = (1/M_N) sum_x f(x) conj(psi_k(x))`, `O(M_N^2)`.
pub fn forward_transform_naive(f: &CylinderFunction) -> Spectrum {
    let basis = f.basis();
    let size = basis.size() as f64;
    let coeffs = (0..basis.size())
        .into_par_iter()
        .map(|k| {
            let psi = psi_values(basis, k).expect("k < M_N");
            f.values()
                .iter()
                .zip(&psi)
                .map(|(v, p)| v * p.conj())
                .sum::<Complex64>()
                / size
        })
        .collect();
    Spectrum {
        basis: basis.clone(),
        coeffs,
    }
}

/// Reconstruction `f(x) = sum_k f^(k) psi_k(x)` by direct summation.
pub fn inverse_transform(s: &Spectrum) -> CylinderFunction {
    let basis = s.basis();
    let mut values = vec![Complex64::new(0.0, 0.0); basis.size()];
    for (k, c) in s.coeffs().iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let psi = psi_values(basis, k).expect("k < M_N");
        for (v, p) in values.iter_mut().zip(&psi) {
            *v += c * p;
        }
    }
    CylinderFunction {
        basis: basis.clone(),
        values,
    }
}

// Arrays at least this long run their per-axis blocks on the rayon pool.
const PARALLEL_THRESHOLD: usize = 1 << 14;

fn axis_pass(data: &mut [Complex64], basis: &Basis, axis: usize, inverse: bool) {
    let m = basis.radix(axis);
    let stride = basis.scale(axis);
    let block = basis.scale(axis + 1);
    let twiddles: Vec<Complex64> = basis
        .roots(axis)
        .iter()
        .map(|r| if inverse { *r } else { r.conj() })
        .collect();

    let process = |chunk: &mut [Complex64]| {
        if m == 2 {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..stride {
            for (d, slot) in line.iter_mut().enumerate() {
                *slot = chunk[i + d * stride];
            }
            for k in 0..m {
                let mut acc = line[0];
                for (d, v) in line.iter().enumerate().skip(1) {
                    acc += v * twiddles[k * d % m];
                }
                chunk[i + k * stride] = acc;
            }
        }
    };

    let blocks = data.len() / block;
    if data.len() >= PARALLEL_THRESHOLD && blocks > 1 {
        data.par_chunks_mut(block).for_each(process);
    } else {
        data.chunks_mut(block).for_each(process);
    }
}

/// Forward transform in `O(M_N * sum_k m_k)` by one DFT per coordinate axis.
pub fn fast_forward_transform(f: &CylinderFunction) -> Spectrum {
    let basis = f.basis();
    let mut data = f.values().to_vec();
    for axis in 0..basis.resolution() {
        axis_pass(&mut data, basis, axis, false);
    }
    let scale = 1.0 / basis.size() as f64;
    for v in &mut data {
        *v *= scale;
    }
    Spectrum {
        basis: basis.clone(),
        coeffs: data,
    }
}

/// Inverse of [`fast_forward_transform`].
pub fn fast_inverse_transform(s: &Spectrum) -> CylinderFunction {
    let basis = s.basis();
    let mut data = s.coeffs().to_vec();
    for axis in 0..basis.resolution() {
        axis_pass(&mut data, basis, axis, true);
    }
    CylinderFunction {
        basis: basis.clone(),
        values: data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn b(r: &[usize]) -> Basis {
        Basis::new(r).unwrap()
    }

    #[test]
    fn rademacher_examples() {
        let basis = b(&[2, 3]);
        let x = GroupPoint::new(&basis, vec![1, 1]).unwrap();
        let r0 = rademacher(0, &x).unwrap();
        assert_abs_diff_eq!(r0.re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r0.im, 0.0, epsilon = 1e-12);
        let r1 = rademacher(1, &x).unwrap();
        assert_abs_diff_eq!(r1.re, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r1.im, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        let zero = GroupPoint::zero(&basis);
        assert_eq!(rademacher(1, &zero).unwrap(), Complex64::new(1.0, 0.0));
        assert!(rademacher(2, &zero).is_err());
    }

    #[test]
    fn characters_have_unit_modulus() {
        let basis = b(&[2, 3, 5]);
        for n in 0..basis.size() {
            for v in psi_values(&basis, n).unwrap() {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi_zero_and_walsh() {
        let basis = b(&[2, 2, 2]);
        for i in 0..basis.size() {
            let x = basis.point(i).unwrap();
            assert_eq!(vilenkin_psi(0, &x).unwrap(), Complex64::new(1.0, 0.0));
            let sign = if x.digit(0) == 1 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(vilenkin_psi(1, &x).unwrap().re, sign, epsilon = 1e-12);
        }
        assert!(vilenkin_psi(8, &basis.point(0).unwrap()).is_err());
    }

    #[test]
    fn psi_rows_match_pointwise_evaluation() {
        let basis = b(&[3, 2, 4]);
        for n in 0..basis.size() {
            let row = psi_values(&basis, n).unwrap();
            for (i, v) in row.iter().enumerate() {
                let direct = vilenkin_psi(n, &basis.point(i).unwrap()).unwrap();
                assert!((v - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn character_coefficients() {
        let basis = b(&[2, 3]);
        let s = forward_transform_naive(&CylinderFunction::character(&basis, 3).unwrap());
        for (k, c) in s.coeffs().iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-10);
        }
        let c = Complex64::new(0.25, -2.0);
        let s = forward_transform_naive(&CylinderFunction::constant(&basis, c));
        assert!((s.coeff(0) - c).norm() < 1e-10);
        assert!(s.coeffs()[1..].iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn indicator_of_first_cylinder() {
        // Direct four-point sum: f = (1, 0, 1, 0) on basis (2, 2).
        let basis = b(&[2, 2]);
        let f = CylinderFunction::cylinder_indicator(&basis, 1).unwrap();
        let s = forward_transform_naive(&f);
        let want = [0.5, 0.5, 0.0, 0.0];
        for (c, w) in s.coeffs().iter().zip(want) {
            assert!((c - Complex64::new(w, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn point_mass_has_flat_spectrum() {
        let basis = b(&[2, 3, 2, 3]);
        let mut delta = vec![Complex64::new(0.0, 0.0); basis.size()];
        delta[0] = Complex64::new(1.0, 0.0);
        let s = fast_forward_transform(&CylinderFunction::new(&basis, delta).unwrap());
        let flat = 1.0 / basis.size() as f64;
        assert!(s.coeffs().iter().all(|c| (c - flat).norm() < 1e-15));
    }

    #[test]
    fn validation_errors() {
        let basis = b(&[2, 3]);
        assert!(matches!(
            CylinderFunction::new(&basis, vec![Complex64::new(0.0, 0.0); 5]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut v = vec![Complex64::new(0.0, 0.0); 6];
        v[4] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(CylinderFunction::new(&basis, v), Err(Error::NonFinite(4)));
    }

    #[test]
    fn csv_layout() {
        let basis = b(&[2]);
        let f = CylinderFunction::from_real(&basis, &[1.0, -0.5]).unwrap();
        assert_eq!(
            f.to_csv(),
            "index,re,im\n0,1.0000000000000000e0,0.0000000000000000e0\n1,-5.0000000000000000e-1,0.0000000000000000e0\n"
        );
    }
}
