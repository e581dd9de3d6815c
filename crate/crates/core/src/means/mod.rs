//! Partial sums, Fejér and Nörlund means, convolution and kernel identities.
//!
//! Every mean is available along two independent routes so that each can
//! serve as the other's oracle:
//!
//! - spectral: multiply the coefficients by the mean's multiplier and
//!   invert with the fast transform ([`partial_sum`], [`fejer_mean`],
//!   [`norlund_mean`]);
//! - spatial: accumulate partial sums character by character
//!   ([`norlund_mean_direct`], [`abel_norlund_mean`]) or convolve with the
//!   materialized kernel ([`convolve`]).

mod identities;
mod kernels;

pub use identities::{
    dirichlet_complement_identity, dirichlet_complement_suite, dirichlet_scale_suite, fejer_closed_form_suite,
    fejer_integral_suites, kernel_domination_check, kernel_domination_suite, norlund_kernel_suite, run_kernel_suite,
    DominationCheck, IdentityReport,
};
pub use kernels::{
    dirichlet_kernel, fejer_kernel, fejer_kernel_closed_form, norlund_kernel, DirichletSweep, Kernel, KernelKind,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::Basis;
use crate::transform::{fast_forward_transform, fast_inverse_transform, psi_values, CylinderFunction, Spectrum};
use crate::weights::NorlundWeights;

/// A summation method, described by its Fourier multiplier.
#[derive(Debug, Clone, Copy)]
pub enum Summation<'a> {
    /// `S_n`: multiplier 1 for `j < n`.
    Partial,
    /// `sigma_n`: multiplier `(n - j)/n`.
    Fejer,
    /// `t_n`: multiplier `Q_{n-j}/Q_n`.
    Norlund(&'a NorlundWeights),
}

impl Summation<'_> {
    /// Coefficient applied to `f^(j)` in the `n`-th mean.
    pub fn multiplier(&self, n: usize, j: usize) -> f64 {
        if j >= n {
            return 0.0;
        }
        match self {
            Summation::Partial => 1.0,
            Summation::Fejer => (n - j) as f64 / n as f64,
            Summation::Norlund(w) => w.partial_sum(n - j) / w.partial_sum(n),
        }
    }

    fn check(&self, basis: &Basis, n: usize) -> Result<()> {
        let allow_zero = matches!(self, Summation::Partial);
        if (n == 0 && !allow_zero) || n > basis.size() {
            return Err(Error::OutOfRange {
                what: "mean order",
                value: n,
                bound: format!("in {}..={}", u8::from(!allow_zero), basis.size()),
            });
        }
        if let Summation::Norlund(w) = self {
            w.ensure_len(n)?;
            if w.partial_sum(n) <= 0.0 {
                return Err(Error::ZeroPartialSum(n));
            }
        }
        Ok(())
    }

    /// The `n`-th mean from precomputed coefficients.
    pub fn apply(&self, spectrum: &Spectrum, n: usize) -> Result<CylinderFunction> {
        self.check(spectrum.basis(), n)?;
        Ok(fast_inverse_transform(
            &spectrum.apply_multiplier(|j| self.multiplier(n, j)),
        ))
    }

    /// Fourier coefficients of the `n`-th kernel.
    pub fn kernel_spectrum(&self, basis: &Basis, n: usize) -> Result<Spectrum> {
        self.check(basis, n)?;
        let coeffs = (0..basis.size())
            .map(|j| Complex64::new(self.multiplier(n, j), 0.0))
            .collect();
        Spectrum::new(basis, coeffs)
    }
}

/// `S_n f = sum_{k<n} f^(k) psi_k`, with `S_0 f = 0`.
pub fn partial_sum(f: &CylinderFunction, n: usize) -> Result<CylinderFunction> {
    Summation::Partial.apply(&fast_forward_transform(f), n)
}

/// `sigma_n f = (1/n) sum_{k=1}^n S_k f`.
pub fn fejer_mean(f: &CylinderFunction, n: usize) -> Result<CylinderFunction> {
    Summation::Fejer.apply(&fast_forward_transform(f), n)
}

/// `t_n f = (1/Q_n) sum_{k=1}^n q_{n-k} S_k f`, spectral route.
pub fn norlund_mean(f: &CylinderFunction, weights: &NorlundWeights, n: usize) -> Result<CylinderFunction> {
    Summation::Norlund(weights).apply(&fast_forward_transform(f), n)
}

/// Running partial sums `S_0 f = 0, S_1 f, ...` in the spatial domain.
struct PartialSums<'a> {
    spectrum: &'a Spectrum,
    next: usize,
    current: Vec<Complex64>,
}

impl<'a> PartialSums<'a> {
    fn new(spectrum: &'a Spectrum) -> Self {
        Self {
            spectrum,
            next: 0,
            current: vec![Complex64::new(0.0, 0.0); spectrum.basis().size()],
        }
    }

    fn advance(&mut self) {
        let c = self.spectrum.coeff(self.next);
        if c != Complex64::new(0.0, 0.0) {
            let psi = psi_values(self.spectrum.basis(), self.next).expect("k < M_N");
            for (s, p) in self.current.iter_mut().zip(&psi) {
                *s += c * p;
            }
        }
        self.next += 1;
    }
}

/// `t_n f` summed literally as `(1/Q_n) sum_{k=1}^n q_{n-k} S_k f`.
pub fn norlund_mean_direct(f: &CylinderFunction, weights: &NorlundWeights, n: usize) -> Result<CylinderFunction> {
    let basis = f.basis();
    Summation::Norlund(weights).check(basis, n)?;
    let spectrum = fast_forward_transform(f);
    let mut sums = PartialSums::new(&spectrum);
    let mut acc = vec![Complex64::new(0.0, 0.0); basis.size()];
    for k in 1..=n {
        sums.advance();
        let q = weights.q(n - k);
        for (a, s) in acc.iter_mut().zip(&sums.current) {
            *a += s * q;
        }
    }
    let q_n = weights.partial_sum(n);
    CylinderFunction::new(basis, acc.into_iter().map(|v| v / q_n).collect())
}

/// `t_n f` through the Abel rearrangement into Fejér means:
/// `(1/Q_n) (sum_{j=1}^{n-1} (q_{n-j} - q_{n-j-1}) j sigma_j f + q_0 n sigma_n f)`.
pub fn abel_norlund_mean(f: &CylinderFunction, weights: &NorlundWeights, n: usize) -> Result<CylinderFunction> {
    let basis = f.basis();
    Summation::Norlund(weights).check(basis, n)?;
    let spectrum = fast_forward_transform(f);
    let mut sums = PartialSums::new(&spectrum);
    // running[x] = sum_{k<=j} S_k f(x) = j sigma_j f(x)
    let mut running = vec![Complex64::new(0.0, 0.0); basis.size()];
    let mut acc = vec![Complex64::new(0.0, 0.0); basis.size()];
    for j in 1..=n {
        sums.advance();
        for (r, s) in running.iter_mut().zip(&sums.current) {
            *r += s;
        }
        let coeff = if j < n {
            weights.q(n - j) - weights.q(n - j - 1)
        } else {
            weights.q(0)
        };
        if coeff != 0.0 {
            for (a, r) in acc.iter_mut().zip(&running) {
                *a += r * coeff;
            }
        }
    }
    let q_n = weights.partial_sum(n);
    CylinderFunction::new(basis, acc.into_iter().map(|v| v / q_n).collect())
}

/// `(f * g)(x) = (1/M_N) sum_t f(t) g(x - t)`, summed directly.
pub fn convolve(f: &CylinderFunction, g: &CylinderFunction) -> Result<CylinderFunction> {
    let basis = f.basis();
    basis.ensure_same(g.basis())?;
    let size = basis.size();
    let mut acc = vec![Complex64::new(0.0, 0.0); size];
    for (t, ft) in f.values().iter().enumerate() {
        if *ft == Complex64::new(0.0, 0.0) {
            continue;
        }
        // x - t = x + (-t)
        let shift = basis.translation_map(basis.neg_index(t));
        for (a, &y) in acc.iter_mut().zip(&shift) {
            *a += ft * g.value(y);
        }
    }
    let inv = 1.0 / size as f64;
    CylinderFunction::new(basis, acc.into_iter().map(|v| v * inv).collect())
}
