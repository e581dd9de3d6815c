//! Acceptance suite: one line per criterion, tolerances pinned below.
//!
//! Runs without the libtest harness so every verdict is printed. The process
//! fails if any criterion fails, except criteria listed in `KNOWN_RED`: those
//! still run in full and print FAIL, and the run fails if one of them starts
//! passing so the list cannot go stale.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin::approx::{
    bound_sweep, constant_rigidity_check, corpus, growth_check, rate_table, BoundContext, BoundReport, CorpusEntry,
    Exponent, LipKind, LipSpec, RateTable, Theorem,
};
use vilenkin::means::{
    abel_norlund_mean, convolve, dirichlet_complement_identity, dirichlet_complement_suite, dirichlet_kernel,
    dirichlet_scale_suite, fejer_closed_form_suite, fejer_integral_suites, kernel_domination_suite, norlund_kernel,
    norlund_mean, norlund_mean_direct, partial_sum,
};
use vilenkin::transform::{fast_forward_transform, fast_inverse_transform, forward_transform_naive, inverse_transform};
use vilenkin::{Basis, Complex64, CylinderFunction, NorlundWeights, WeightSpec};

const IDENTITY_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-10;
const BOUND_SLACK: f64 = 1e-9;
const C_CAP_FACTOR: f64 = 32.0;
const C_GROWTH: f64 = 2.0;
const SCALE_IDENTITY_BUDGET: Duration = Duration::from_secs(10);
const RATE_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_FUNCTIONS: u64 = 100;
const CORPUS_SIZE: usize = 56;
const CORPUS_SEED: u64 = 2024;
const EXPONENTS: [f64; 3] = [1.0, 2.0, 4.0];

/// Criteria that cannot hold as stated, with the reason printed next to the
/// FAIL line.
const KNOWN_RED: &[(u32, &str)] = &[(
    5,
    "the domination constant 2 fails at x = 0, where n K_n(0) = n(n+1)/2 exceeds \
     2 sum_l M_l (M_l + 1)/2 (e.g. basis (2,3,2), n = 5: 15 > 8)",
)];

const TEST_BASES: [&str; 3] = ["dyadic:8", "triadic:6", "mixed:2,3,2,3,2,3"];
/// Bases with `M_N <= 256` for the exhaustive complement identity.
const SMALL_BASES: [&str; 3] = ["dyadic:8", "triadic:5", "mixed:2,3,2,3,2,3"];

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn basis(s: &str) -> Basis {
    s.parse().expect("valid basis")
}

fn exponents() -> Vec<Exponent> {
    EXPONENTS.iter().map(|&p| Exponent::new(p).unwrap()).collect()
}

fn random_function(basis: &Basis, seed: u64) -> CylinderFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CylinderFunction::from_fn(basis, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Corpus entries and their bound contexts, built once per basis.
struct Corpus {
    basis: Basis,
    entries: Vec<CorpusEntry>,
    contexts: Vec<BoundContext>,
}

fn corpora() -> &'static [Corpus] {
    static CELL: OnceLock<Vec<Corpus>> = OnceLock::new();
    CELL.get_or_init(|| {
        TEST_BASES
            .iter()
            .map(|s| {
                let basis = basis(s);
                let entries = corpus(&basis, CORPUS_SEED, CORPUS_SIZE);
                let contexts = entries
                    .iter()
                    .map(|e| {
                        BoundContext::new(&e.function, &exponents())
                            .unwrap()
                            .with_alpha(e.alpha)
                    })
                    .collect();
                Corpus {
                    basis,
                    entries,
                    contexts,
                }
            })
            .collect()
    })
}

fn weights(spec: WeightSpec, basis: &Basis) -> NorlundWeights {
    spec.build(basis.size() + 1).unwrap()
}

/// `q_k = 1 + 1/(k+1)`: non-increasing, positive, and `Q_n >= n`.
fn slowly_decreasing(basis: &Basis) -> NorlundWeights {
    let q = (0..=basis.size()).map(|k| 1.0 + 1.0 / (k as f64 + 1.0)).collect();
    NorlundWeights::from_values("custom:1+1/(k+1)", q).unwrap()
}

fn orders(basis: &Basis) -> Vec<usize> {
    (basis.scale(2)..=basis.size()).collect()
}

fn max_ratio(rows: &[BoundReport]) -> f64 {
    rows.iter().map(|r| r.ratio_or_c).fold(0.0, f64::max)
}

fn c1_scale_identity() -> Verdict {
    let start = Instant::now();
    let reports: Vec<_> = TEST_BASES
        .iter()
        .map(|s| dirichlet_scale_suite(&basis(s), IDENTITY_TOL))
        .collect();
    let elapsed = start.elapsed();
    let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    verdict(
        reports.iter().all(|r| r.pass) && elapsed < SCALE_IDENTITY_BUDGET,
        format!("max residual {worst:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn c2_complement_identity() -> Verdict {
    let mut worst = 0.0f64;
    let mut pass = true;
    for s in SMALL_BASES {
        let b = basis(s);
        assert!(b.size() <= 256);
        let r = dirichlet_complement_suite(&b, IDENTITY_TOL);
        worst = worst.max(r.max_residual);
        pass &= r.pass;
    }
    // Pointwise pairs summed from the definitions, independent of the sweep.
    let b = basis("mixed:2,3,2,3,2,3");
    for (n, j) in [(3, 0), (3, 5), (4, 17), (6, 100), (6, 215)] {
        let r = dirichlet_complement_identity(&b, n, j).unwrap();
        worst = worst.max(r);
        pass &= r < IDENTITY_TOL;
    }
    verdict(pass, format!("max residual {worst:.2e} over all (n, j), j < M_n"))
}

fn c3_closed_form() -> Verdict {
    let reports: Vec<_> = TEST_BASES
        .iter()
        .map(|s| fejer_closed_form_suite(&basis(s), IDENTITY_TOL))
        .collect();
    let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    verdict(reports.iter().all(|r| r.pass), format!("max residual {worst:.2e}"))
}

fn c4_fejer_integrals() -> Verdict {
    let mut mean = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    let mut pass = true;
    for s in TEST_BASES {
        let [a, b] = fejer_integral_suites(&basis(s), IDENTITY_TOL);
        mean = mean.max(a.max_residual);
        excess = excess.max(b.max_residual);
        pass &= a.pass && b.pass;
    }
    verdict(
        pass,
        format!("max |int K_n - 1| {mean:.2e}, max int|K_n| - 2 = {excess:.3}"),
    )
}

fn c5_domination() -> Verdict {
    let reports: Vec<_> = TEST_BASES
        .iter()
        .map(|s| (s, kernel_domination_suite(&basis(s), IDENTITY_TOL)))
        .collect();
    let detail = reports
        .iter()
        .map(|(s, r)| format!("{s}: max ratio {:.4}", r.max_residual + 1.0))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(reports.iter().all(|(_, r)| r.pass), detail)
}

fn c6_oracles() -> Verdict {
    let mut fast_vs_naive = 0.0f64;
    let mut inverse = 0.0f64;
    let mut dirichlet = 0.0f64;
    let mut norlund = 0.0f64;
    for (bi, s) in TEST_BASES.iter().enumerate() {
        let b = basis(s);
        for seed in 0..ORACLE_FUNCTIONS {
            let f = random_function(&b, seed * 7 + bi as u64);
            let fast = fast_forward_transform(&f);
            fast_vs_naive = fast_vs_naive.max(fast.sup_distance(&forward_transform_naive(&f)));
            if seed < 10 {
                inverse = inverse.max(fast_inverse_transform(&fast).sup_distance(&inverse_transform(&fast)));
            }
        }
        let f = random_function(&b, 999 + bi as u64);
        let size = b.size();
        for n in [1, 2, 5, b.scale(2), b.scale(3) + 1, size / 2 + 3, size] {
            let spectral = partial_sum(&f, n).unwrap();
            let conv = convolve(&f, &dirichlet_kernel(&b, n).unwrap()).unwrap();
            dirichlet = dirichlet.max(spectral.sup_distance(&conv));
        }
        for spec in [WeightSpec::Power(1.0), WeightSpec::Log, WeightSpec::Geometric(0.5)] {
            let w = weights(spec, &b);
            for n in [1, 3, b.scale(3), size / 3 + 1, size] {
                let direct = norlund_mean_direct(&f, &w, n).unwrap();
                let abel = abel_norlund_mean(&f, &w, n).unwrap();
                let conv = convolve(&f, &norlund_kernel(&w, &b, n).unwrap()).unwrap();
                let spectral = norlund_mean(&f, &w, n).unwrap();
                norlund = norlund
                    .max(direct.sup_distance(&abel))
                    .max(direct.sup_distance(&conv))
                    .max(direct.sup_distance(&spectral));
            }
        }
    }
    let worst = fast_vs_naive.max(inverse).max(dirichlet).max(norlund);
    verdict(
        worst < ORACLE_TOL,
        format!(
            "fast/naive {fast_vs_naive:.1e} ({ORACLE_FUNCTIONS} functions x 3 bases), inverse {inverse:.1e}, \
             S_n vs D_n* {dirichlet:.1e}, direct/Abel/F_n*/spectral {norlund:.1e}"
        ),
    )
}

fn c7_fejer_bound() -> Verdict {
    let mut rows = 0;
    let mut failed = 0;
    let mut worst = 0.0f64;
    for c in corpora() {
        let r = bound_sweep(&c.contexts, Theorem::Fejer, None, &orders(&c.basis)).unwrap();
        rows += r.len();
        failed += r.iter().filter(|x| x.ratio_or_c > 1.0 + BOUND_SLACK).count();
        worst = worst.max(max_ratio(&r));
    }
    verdict(
        failed == 0,
        format!("{rows} rows ({CORPUS_SIZE} functions x 3 bases x n in [M_2, M_N] x p in {{1,2,4}}), max ratio {worst:.4}, {failed} failures"),
    )
}

fn c8_theorem_one() -> Verdict {
    let mut rows = 0;
    let mut failed = 0;
    let mut worst = 0.0f64;
    for c in corpora() {
        for spec in [WeightSpec::Constant, WeightSpec::Power(1.0), WeightSpec::Log] {
            let w = weights(spec, &c.basis);
            let r = bound_sweep(&c.contexts, Theorem::One, Some(&w), &orders(&c.basis)).unwrap();
            rows += r.len();
            failed += r.iter().filter(|x| x.ratio_or_c > 1.0 + BOUND_SLACK).count();
            worst = worst.max(max_ratio(&r));
        }
    }
    verdict(
        failed == 0,
        format!("{rows} rows, weights {{constant, power:1, log}}, max ratio {worst:.4}, {failed} failures"),
    )
}

fn c9_empirical_constants() -> Verdict {
    let mut pass = true;
    let mut worst_two = 0.0f64;
    let mut worst_three = 0.0f64;
    let mut growth_failures = Vec::new();
    for c in corpora() {
        let cap = C_CAP_FACTOR * (c.basis.r_sup() as f64).powi(3);
        let scale_grid: Vec<usize> = (1..=c.basis.resolution()).collect();
        let two = [
            weights(WeightSpec::Constant, &c.basis),
            weights(WeightSpec::Geometric(0.5), &c.basis),
            weights(WeightSpec::Power(-1.0), &c.basis),
            weights(WeightSpec::Power(-0.5), &c.basis),
            slowly_decreasing(&c.basis),
        ];
        for w in &two {
            let r = bound_sweep(&c.contexts, Theorem::Two, Some(w), &scale_grid).unwrap();
            let m = max_ratio(&r);
            worst_two = worst_two.max(m);
            let g = growth_check(&c.basis, &r);
            let grows = !(g.last_quarter_max <= C_GROWTH * g.first_quarter_max || g.last_quarter_max == 0.0);
            if grows {
                growth_failures.push(format!("thm2 {} {}", c.basis, w.label()));
            }
            pass &= m <= cap && !grows;
        }
        for w in [weights(WeightSpec::Constant, &c.basis), slowly_decreasing(&c.basis)] {
            let r = bound_sweep(&c.contexts, Theorem::Three, Some(&w), &orders(&c.basis)).unwrap();
            let m = max_ratio(&r);
            worst_three = worst_three.max(m);
            let g = growth_check(&c.basis, &r);
            let grows = !(g.last_quarter_max <= C_GROWTH * g.first_quarter_max || g.last_quarter_max == 0.0);
            if grows {
                growth_failures.push(format!("thm3 {} {}", c.basis, w.label()));
            }
            pass &= m <= cap && !grows;
        }
    }
    verdict(
        pass,
        format!(
            "max C: theorem 2 {worst_two:.4}, theorem 3 {worst_three:.4} (cap 32 R^3 >= 256); growth failures: {}",
            if growth_failures.is_empty() {
                "none".to_string()
            } else {
                growth_failures.join("; ")
            }
        ),
    )
}

fn c10_rates() -> Verdict {
    let start = Instant::now();
    let b = basis("dyadic:12");
    let mut pass = true;
    let mut notes = Vec::new();
    for spec in [WeightSpec::Constant, WeightSpec::Power(1.0)] {
        let w = weights(spec, &b);
        for p in [Exponent::ONE, Exponent::TWO] {
            let table = |alpha: f64| -> RateTable {
                let s = LipSpec::new(LipKind::Lacunary, alpha, p).unwrap();
                rate_table(&s, &b, &w, 0).unwrap()
            };
            let half = table(0.5).slope.unwrap();
            let two = table(2.0).slope.unwrap();
            let band = table(1.0).log_linear_band;
            let ok = (-0.65..=-0.35).contains(&half)
                && (-1.25..=-0.75).contains(&two)
                && band.0 >= 1.0 / 8.0
                && band.1 <= 8.0;
            pass &= ok;
            notes.push(format!(
                "{} p={p}: {half:.3}/{two:.3}/[{:.2},{:.2}]",
                w.label(),
                band.0,
                band.1
            ));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < RATE_BUDGET;
    verdict(
        pass,
        format!(
            "slope a=0.5 / slope a=2 / a=1 ratio band: {}; {:.2} s",
            notes.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn c11_rigidity() -> Verdict {
    let mut checked = 0;
    let mut failed = Vec::new();
    for c in corpora() {
        let levels: Vec<usize> = (1..=c.basis.resolution()).collect();
        for e in &c.entries {
            for p in exponents() {
                let v = constant_rigidity_check(&e.function, p, &levels).unwrap();
                checked += 1;
                if !v.pass {
                    failed.push(format!("{} {} p={p}", c.basis, e.label));
                }
            }
        }
    }
    verdict(
        failed.is_empty(),
        format!(
            "{checked} (function, p) pairs, {} below floor {}",
            failed.len(),
            failed.join("; ")
        ),
    )
}

fn run_cli(out: &Path, args: &[&str]) -> std::process::ExitStatus {
    Command::new(env!("CARGO_BIN_EXE_vilenkin"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("run vilenkin binary")
}

fn c12_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        (
            "bounds.csv",
            vec!["bounds", "--basis", "mixed:2,3,2,3", "--p", "1,2,4", "--seed", "17"],
        ),
        (
            "rates.csv",
            vec![
                "rates",
                "--basis",
                "dyadic:8",
                "--family",
                "random-lacunary",
                "--seed",
                "17",
            ],
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (file, args) in &runs {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let ok = run_cli(&a, args).success() && run_cli(&b, args).success();
        let same = ok && std::fs::read(a.join(file)).unwrap() == std::fs::read(b.join(file)).unwrap();
        pass &= same;
        notes.push(format!("{file} {}", if same { "identical" } else { "differs" }));
    }
    // The seed must matter, or identical bytes would prove nothing.
    let c = dir.path().join("c");
    let mut other = runs[0].1.clone();
    *other.last_mut().unwrap() = "18";
    run_cli(&c, &other);
    let seeded =
        std::fs::read(c.join("bounds.csv")).unwrap() != std::fs::read(dir.path().join("a/bounds.csv")).unwrap();
    pass &= seeded;
    notes.push(format!("other seed {}", if seeded { "differs" } else { "identical" }));
    verdict(pass, notes.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "D_{M_n} = M_n 1_{I_n}", c1_scale_identity),
        (2, "Dirichlet complement identity", c2_complement_identity),
        (3, "Fejér kernel closed form", c3_closed_form),
        (4, "Fejér kernel integrals", c4_fejer_integrals),
        (5, "Fejér kernel domination", c5_domination),
        (6, "transform and mean oracles", c6_oracles),
        (7, "Fejér bound with constant R^2", c7_fejer_bound),
        (8, "non-decreasing weights, constants 3R^3 and 2R^3", c8_theorem_one),
        (9, "non-increasing weights, empirical constants", c9_empirical_constants),
        (10, "rate table on dyadic:12", c10_rates),
        (11, "constant rigidity", c11_rigidity),
        (12, "CLI determinism", c12_determinism),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id);
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name}: {} [{:.1} s]",
            v.detail,
            start.elapsed().as_secs_f64()
        );
        if let Some((_, why)) = known {
            println!("             known red: {why}");
        }
        if v.pass {
            passed += 1;
        }
        if v.pass == known.is_some() {
            unexpected += 1;
        }
    }
    println!(
        "acceptance: {passed}/12 pass, {} known red, {unexpected} unexpected",
        KNOWN_RED.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
