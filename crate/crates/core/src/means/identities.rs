//! Exhaustive checks of the Dirichlet and Fejér kernel identities.
//!
//! Each suite walks the running Dirichlet kernels `D_1, D_2, ...` once and
//! compares the definition against the identity at every coset. Bound-type
//! checks report `max(lhs - bound)` (or `max ratio - 1`) as their residual,
//! so a negative residual is slack.

use num_complex::Complex64;
use serde::Serialize;

use super::kernels::{dirichlet_kernel, fejer_kernel, fejer_kernel_closed_form, norlund_kernel, DirichletSweep};
use super::Summation;
use crate::error::{Error, Result};
use crate::group::Basis;
use crate::transform::{fast_inverse_transform, psi_values};
use crate::weights::NorlundWeights;

/// Outcome of one identity suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub max_residual: f64,
    pub pass: bool,
}

impl IdentityReport {
    fn new(identity: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.into(),
            max_residual,
            pass: max_residual <= tolerance,
        }
    }
}

/// `D_{M_n} = M_n 1_{I_n}` for every `n <= N`.
pub fn dirichlet_scale_suite(basis: &Basis, tolerance: f64) -> IdentityReport {
    let mut sweep = DirichletSweep::new(basis);
    let mut worst = 0.0f64;
    for n in 0..=basis.resolution() {
        let m_n = basis.scale(n);
        while sweep.order() < m_n {
            sweep.advance();
        }
        for (i, v) in sweep.current().iter().enumerate() {
            let want = if i % m_n == 0 { m_n as f64 } else { 0.0 };
            worst = worst.max((v - want).norm());
        }
    }
    IdentityReport::new("dirichlet_scale", worst, tolerance)
}

fn check_complement_args(basis: &Basis, n: usize, j: usize) -> Result<()> {
    if n > basis.resolution() {
        return Err(Error::OutOfRange {
            what: "scale index",
            value: n,
            bound: format!("<= N = {}", basis.resolution()),
        });
    }
    if j >= basis.scale(n) {
        return Err(Error::OutOfRange {
            what: "j",
            value: j,
            bound: format!("< M_n = {}", basis.scale(n)),
        });
    }
    Ok(())
}

/// `sup_x |D_{M_n - j} - (D_{M_n} - psi_{M_n - 1} conj(D_j))|` for one pair,
/// every kernel summed from its definition.
pub fn dirichlet_complement_identity(basis: &Basis, n: usize, j: usize) -> Result<f64> {
    check_complement_args(basis, n, j)?;
    let m_n = basis.scale(n);
    let lhs = dirichlet_kernel(basis, m_n - j)?;
    let full = dirichlet_kernel(basis, m_n)?;
    let d_j = dirichlet_kernel(basis, j)?;
    let psi = psi_values(basis, m_n - 1)?;
    Ok((0..basis.size())
        .map(|x| {
            let rhs = full.value(x) - psi[x] * d_j.value(x).conj();
            (lhs.value(x) - rhs).norm()
        })
        .fold(0.0, f64::max))
}

/// The complement identity for all `n <= N` and all `j < M_n`.
pub fn dirichlet_complement_suite(basis: &Basis, tolerance: f64) -> IdentityReport {
    let size = basis.size();
    let mut global = DirichletSweep::new(basis);
    let mut worst = 0.0f64;
    for n in 0..=basis.resolution() {
        let m_n = basis.scale(n);
        while global.order() < m_n {
            global.advance();
        }
        let full = global.current().to_vec();
        let psi_last = psi_values(basis, m_n - 1).expect("M_n - 1 < M_N");
        let mut up = DirichletSweep::new(basis);
        // down holds D_{M_n - j}
        let mut down = full.clone();
        for j in 0..m_n {
            for x in 0..size {
                let rhs = full[x] - psi_last[x] * up.current()[x].conj();
                worst = worst.max((down[x] - rhs).norm());
            }
            up.advance();
            let row = psi_values(basis, m_n - j - 1).expect("index < M_N");
            for (d, p) in down.iter_mut().zip(&row) {
                *d -= p;
            }
        }
    }
    IdentityReport::new("dirichlet_complement", worst, tolerance)
}

/// Running `sum_{k=1}^n D_k = n K_n` alongside the Dirichlet sweep.
struct FejerSweep {
    dirichlet: DirichletSweep,
    sum: Vec<Complex64>,
}

impl FejerSweep {
    fn new(basis: &Basis) -> Self {
        Self {
            dirichlet: DirichletSweep::new(basis),
            sum: vec![Complex64::new(0.0, 0.0); basis.size()],
        }
    }

    fn order(&self) -> usize {
        self.dirichlet.order()
    }

    fn advance(&mut self) -> bool {
        if !self.dirichlet.advance() {
            return false;
        }
        for (s, d) in self.sum.iter_mut().zip(self.dirichlet.current()) {
            *s += d;
        }
        true
    }
}

/// Closed form of `K_{M_n}` against the summed definition, `n <= N`.
pub fn fejer_closed_form_suite(basis: &Basis, tolerance: f64) -> IdentityReport {
    let mut sweep = FejerSweep::new(basis);
    let mut worst = 0.0f64;
    for n in 0..=basis.resolution() {
        let m_n = basis.scale(n);
        while sweep.order() < m_n {
            sweep.advance();
        }
        let closed = fejer_kernel_closed_form(basis, n).expect("n <= N");
        let inv = 1.0 / m_n as f64;
        for (s, c) in sweep.sum.iter().zip(closed.values()) {
            worst = worst.max((s * inv - c).norm());
        }
    }
    IdentityReport::new("fejer_closed_form", worst, tolerance)
}

/// `int K_n = 1` and `int |K_n| <= 2` for every `1 <= n <= M_N`.
pub fn fejer_integral_suites(basis: &Basis, tolerance: f64) -> [IdentityReport; 2] {
    let mut sweep = FejerSweep::new(basis);
    let size = basis.size() as f64;
    let mut mean_residual = 0.0f64;
    let mut abs_excess = f64::NEG_INFINITY;
    while sweep.advance() {
        let n = sweep.order() as f64;
        let integral = sweep.sum.iter().sum::<Complex64>() / (size * n);
        let abs_integral = sweep.sum.iter().map(|v| v.norm()).sum::<f64>() / (size * n);
        mean_residual = mean_residual.max((integral - 1.0).norm());
        abs_excess = abs_excess.max(abs_integral - 2.0);
    }
    [
        IdentityReport::new("fejer_integral", mean_residual, tolerance),
        IdentityReport::new("fejer_abs_integral", abs_excess, tolerance),
    ]
}

/// Worst ratio `n|K_n(x)| / (2 sum_{l<=|n|} M_l |K_{M_l}(x)|)` for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationCheck {
    pub ratio: f64,
    /// Cosets where the dominating sum vanishes but `n|K_n|` does not.
    pub flagged: usize,
}

impl DominationCheck {
    fn absorb(&mut self, numerator: &[Complex64], dominant: &[f64]) {
        for (num, dom) in numerator.iter().zip(dominant) {
            let num = num.norm();
            if *dom > 0.0 {
                self.ratio = self.ratio.max(num / dom);
            } else if num > 1e-10 {
                self.flagged += 1;
            }
        }
    }
}

/// Domination of `n|K_n|` by the scale kernels, exhaustively over cosets.
pub fn kernel_domination_check(basis: &Basis, n: usize) -> Result<DominationCheck> {
    let k_n = fejer_kernel(basis, n)?;
    let numerator: Vec<Complex64> = k_n.values().iter().map(|v| v * n as f64).collect();
    let mut dominant = vec![0.0; basis.size()];
    for l in 0..=basis.level(n) {
        let m_l = basis.scale(l);
        let k = fejer_kernel(basis, m_l)?;
        for (d, v) in dominant.iter_mut().zip(k.values()) {
            *d += 2.0 * m_l as f64 * v.norm();
        }
    }
    let mut check = DominationCheck { ratio: 0.0, flagged: 0 };
    check.absorb(&numerator, &dominant);
    Ok(check)
}

/// The domination inequality for every `1 <= n <= M_N`.
///
/// Uses `n K_n = sum_{k<=n} D_k`, so the scale terms `M_l |K_{M_l}|` are the
/// magnitudes of the running sum captured at `n = M_l`.
pub fn kernel_domination_suite(basis: &Basis, tolerance: f64) -> IdentityReport {
    let mut sweep = FejerSweep::new(basis);
    let mut dominant = vec![0.0; basis.size()];
    let mut next_scale = 0;
    let mut check = DominationCheck { ratio: 0.0, flagged: 0 };
    while sweep.advance() {
        let n = sweep.order();
        if next_scale <= basis.resolution() && n == basis.scale(next_scale) {
            for (d, s) in dominant.iter_mut().zip(&sweep.sum) {
                *d += 2.0 * s.norm();
            }
            next_scale += 1;
        }
        check.absorb(&sweep.sum, &dominant);
    }
    let residual = if check.flagged > 0 {
        f64::INFINITY
    } else {
        check.ratio - 1.0
    };
    IdentityReport::new("fejer_domination", residual, tolerance)
}

/// Orders sampled by the Nörlund kernel suite: small orders and both sides
/// of every scale.
fn norlund_sample_orders(basis: &Basis) -> Vec<usize> {
    let size = basis.size();
    let mut orders: Vec<usize> = vec![1, 2, 3];
    for &m in basis.scales() {
        orders.extend([m.saturating_sub(1), m, m + 1]);
    }
    orders.retain(|&n| n >= 1 && n <= size);
    orders.sort_unstable();
    orders.dedup();
    orders
}

/// `int F_n = 1`, and the summed kernel equals the one synthesized from its
/// multipliers `Q_{n-j}/Q_n`.
pub fn norlund_kernel_suite(basis: &Basis, weights: &NorlundWeights, tolerance: f64) -> Result<IdentityReport> {
    let mut worst = 0.0f64;
    for n in norlund_sample_orders(basis) {
        let summed = norlund_kernel(weights, basis, n)?;
        let synthesized = fast_inverse_transform(&Summation::Norlund(weights).kernel_spectrum(basis, n)?);
        worst = worst
            .max((summed.integral() - 1.0).norm())
            .max(summed.sup_distance(&synthesized));
    }
    Ok(IdentityReport::new(
        format!("norlund_kernel[{}]", weights.label()),
        worst,
        tolerance,
    ))
}

/// Every kernel identity for `basis`, plus one Nörlund suite per weight set.
pub fn run_kernel_suite(basis: &Basis, weights: &[NorlundWeights], tolerance: f64) -> Result<Vec<IdentityReport>> {
    let mut reports = vec![
        dirichlet_scale_suite(basis, tolerance),
        dirichlet_complement_suite(basis, tolerance),
        fejer_closed_form_suite(basis, tolerance),
    ];
    reports.extend(fejer_integral_suites(basis, tolerance));
    reports.push(kernel_domination_suite(basis, tolerance));
    for w in weights {
        reports.push(norlund_kernel_suite(basis, w, tolerance)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::IDENTITY;

    fn b(r: &[usize]) -> Basis {
        Basis::new(r).unwrap()
    }

    #[test]
    fn complement_examples() {
        let basis = b(&[2, 3, 2]);
        assert_eq!(dirichlet_complement_identity(&basis, 2, 0).unwrap(), 0.0);
        assert!(dirichlet_complement_identity(&basis, 2, 1).unwrap() < 1e-10);
        let walsh = b(&[2, 2, 2]);
        assert!(dirichlet_complement_identity(&walsh, 3, 3).unwrap() < 1e-10);
        assert!(dirichlet_complement_identity(&walsh, 3, 8).is_err());
        assert!(dirichlet_complement_identity(&walsh, 4, 0).is_err());
    }

    #[test]
    fn streamed_complement_suite_agrees_with_pointwise_pairs() {
        let basis = b(&[2, 3, 2]);
        let mut worst = 0.0f64;
        for n in 0..=3 {
            for j in 0..basis.scale(n) {
                worst = worst.max(dirichlet_complement_identity(&basis, n, j).unwrap());
            }
        }
        let suite = dirichlet_complement_suite(&basis, IDENTITY);
        assert!(suite.pass && worst < IDENTITY);
    }

    #[test]
    fn domination_holds_at_scales() {
        let basis = b(&[2, 3, 2]);
        // At n = M_j the l = j term alone gives ratio <= 1/2.
        for &m in basis.scales() {
            let c = kernel_domination_check(&basis, m).unwrap();
            assert!(c.ratio <= 0.5 + 1e-12 && c.flagged == 0, "n={m} {c:?}");
        }
    }

    #[test]
    fn domination_constant_two_fails_at_the_identity() {
        // K_n(0) = (n + 1)/2, so at x = 0 the ratio is n(n+1) / (2 sum_l M_l(M_l+1)).
        let basis = b(&[2, 3, 2]);
        let c = kernel_domination_check(&basis, 5).unwrap();
        assert!((c.ratio - 15.0 / 8.0).abs() < 1e-12, "{c:?}");
        let cube = b(&[3, 3, 3]);
        let c = kernel_domination_check(&cube, 17).unwrap();
        assert!((c.ratio - 153.0 / 104.0).abs() < 1e-12, "{c:?}");
        assert_eq!(c.flagged, 0);
    }

    #[test]
    fn suite_matches_pointwise_domination() {
        let basis = b(&[3, 2, 3]);
        let worst = (1..=basis.size())
            .map(|n| kernel_domination_check(&basis, n).unwrap().ratio)
            .fold(0.0, f64::max);
        let suite = kernel_domination_suite(&basis, IDENTITY);
        assert!((suite.max_residual - (worst - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn equality_and_integral_suites_pass_on_small_bases() {
        let weights = vec![
            crate::WeightSpec::Constant.build(64).unwrap(),
            crate::WeightSpec::Power(1.0).build(64).unwrap(),
            crate::WeightSpec::Geometric(0.5).build(64).unwrap(),
        ];
        for radices in [&[2usize, 2, 2, 2][..], &[2, 3, 2], &[4, 3], &[5, 2, 3]] {
            let basis = b(radices);
            for report in run_kernel_suite(&basis, &weights, IDENTITY).unwrap() {
                if report.identity == "fejer_domination" {
                    continue;
                }
                assert!(report.pass, "{radices:?}: {report:?}");
            }
        }
    }
}
