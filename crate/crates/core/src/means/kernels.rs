use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::Basis;
use crate::transform::{psi_values, CylinderFunction};
use crate::weights::NorlundWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    Norlund,
}

/// A materialized summation kernel of order `n`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub kind: KernelKind,
    pub order: usize,
    /// Label of the generating weights for Nörlund kernels.
    pub weights: Option<String>,
    pub function: CylinderFunction,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_order(basis: &Basis, n: usize, allow_zero: bool) -> Result<()> {
    if (n == 0 && !allow_zero) || n > basis.size() {
        return Err(Error::OutOfRange {
            what: "kernel order",
            value: n,
            bound: format!("in {}..={}", u8::from(!allow_zero), basis.size()),
        });
    }
    Ok(())
}

/// Running Dirichlet kernels `D_0 = 0, D_1, D_2, ...` built by adding one
/// character row per step.
pub struct DirichletSweep {
    basis: Basis,
    next: usize,
    current: Vec<Complex64>,
}

impl DirichletSweep {
    pub fn new(basis: &Basis) -> Self {
        Self {
            basis: basis.clone(),
            next: 0,
            current: vec![ZERO; basis.size()],
        }
    }

    /// Order of the kernel currently held.
    pub fn order(&self) -> usize {
        self.next
    }

    pub fn current(&self) -> &[Complex64] {
        &self.current
    }

    /// Advances from `D_k` to `D_{k+1}`. Returns `false` past `D_{M_N}`.
    pub fn advance(&mut self) -> bool {
        if self.next >= self.basis.size() {
            return false;
        }
        let psi = psi_values(&self.basis, self.next).expect("order < M_N");
        for (d, p) in self.current.iter_mut().zip(&psi) {
            *d += p;
        }
        self.next += 1;
        true
    }
}

/// `D_n = sum_{k<n} psi_k`; `D_0 = 0` by convention.
pub fn dirichlet_kernel(basis: &Basis, n: usize) -> Result<CylinderFunction> {
    check_order(basis, n, true)?;
    let mut sweep = DirichletSweep::new(basis);
    while sweep.order() < n {
        sweep.advance();
    }
    CylinderFunction::new(basis, sweep.current)
}

/// `K_n = (1/n) sum_{k=1}^n D_k`.
pub fn fejer_kernel(basis: &Basis, n: usize) -> Result<CylinderFunction> {
    check_order(basis, n, false)?;
    let mut sweep = DirichletSweep::new(basis);
    let mut acc = vec![ZERO; basis.size()];
    while sweep.order() < n {
        sweep.advance();
        for (a, d) in acc.iter_mut().zip(sweep.current()) {
            *a += d;
        }
    }
    let inv = 1.0 / n as f64;
    CylinderFunction::new(basis, acc.into_iter().map(|v| v * inv).collect())
}

/// `F_n = (1/Q_n) sum_{k=1}^n q_{n-k} D_k`.
pub fn norlund_kernel(weights: &NorlundWeights, basis: &Basis, n: usize) -> Result<CylinderFunction> {
    check_order(basis, n, false)?;
    weights.ensure_len(n)?;
    let q_n = weights.partial_sum(n);
    if q_n <= 0.0 {
        return Err(Error::ZeroPartialSum(n));
    }
    let mut sweep = DirichletSweep::new(basis);
    let mut acc = vec![ZERO; basis.size()];
    while sweep.order() < n {
        sweep.advance();
        let q = weights.q(n - sweep.order());
        if q != 0.0 {
            for (a, d) in acc.iter_mut().zip(sweep.current()) {
                *a += d * q;
            }
        }
    }
    CylinderFunction::new(basis, acc.into_iter().map(|v| v / q_n).collect())
}

/// `K_{M_n}` evaluated from its three-case closed form:
///
/// - `(M_n + 1)/2` on `I_n`;
/// - `M_t / (1 - r_t(x))` when `x` lies in `I_t \ I_{t+1}` and
///   `x - x_t e_t` lies in `I_n`, i.e. `t < n` is the only nonzero digit
///   among the first `n`;
/// - `0` otherwise.
pub fn fejer_kernel_closed_form(basis: &Basis, n: usize) -> Result<CylinderFunction> {
    if n > basis.resolution() {
        return Err(Error::OutOfRange {
            what: "scale index",
            value: n,
            bound: format!("<= N = {}", basis.resolution()),
        });
    }
    let m_n = basis.scale(n) as f64;
    let values = (0..basis.size())
        .map(|i| {
            let digits = basis.digits_of(i);
            let head = &digits[..n];
            match head.iter().position(|&d| d != 0) {
                None => Complex64::new((m_n + 1.0) / 2.0, 0.0),
                Some(t) if head[t + 1..].iter().all(|&d| d == 0) => {
                    let r_t = basis.unit_root(t, digits[t]);
                    basis.scale(t) as f64 / (Complex64::new(1.0, 0.0) - r_t)
                }
                Some(_) => ZERO,
            }
        })
        .collect();
    CylinderFunction::new(basis, values)
}

impl Kernel {
    pub fn dirichlet(basis: &Basis, n: usize) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Dirichlet,
            order: n,
            weights: None,
            function: dirichlet_kernel(basis, n)?,
        })
    }

    pub fn fejer(basis: &Basis, n: usize) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Fejer,
            order: n,
            weights: None,
            function: fejer_kernel(basis, n)?,
        })
    }

    pub fn norlund(weights: &NorlundWeights, basis: &Basis, n: usize) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Norlund,
            order: n,
            weights: Some(weights.label().to_string()),
            function: norlund_kernel(weights, basis, n)?,
        })
    }
}
