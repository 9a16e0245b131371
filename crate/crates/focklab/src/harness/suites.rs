//! Named verification suites: each check pins one reproducible claim about
//! the operators — worked-example values, exact shift spectra, divergence
//! dichotomies, the companion-family implication, and transform/norm ratio
//! bands — at a fixed tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;

use crate::criteria::{
    berezin_lp_integral, classify_symbolic, companion_comparison, criterion_integral,
    domination_ratio, moment_comparison_ratio, TransformWhich,
};
use crate::fock::FockParams;
use crate::operator::{
    apply_operator, shift_weight, OperatorKind, SymbolPair, TruncatedOperator,
};
use crate::poly::{parse_complex, Poly};
use crate::quadrature::{probe_divergence, ProbeSettings, QuadratureGrid};
use crate::spectrum::{
    convergence_diagnose, singular_values, ConvergenceVerdict, SchattenOrder,
};

use super::config::ExperimentConfig;
use super::report::{CheckStatus, ResultRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Kernel,
    Shifts,
    PaperExample,
    Dichotomy,
    Corollary,
    Theorem1,
    All,
}

impl SuiteName {
    pub fn parse(s: &str) -> Option<SuiteName> {
        match s {
            "kernel" => Some(SuiteName::Kernel),
            "shifts" => Some(SuiteName::Shifts),
            "paper-example" => Some(SuiteName::PaperExample),
            "dichotomy" => Some(SuiteName::Dichotomy),
            "corollary" => Some(SuiteName::Corollary),
            "theorem1" => Some(SuiteName::Theorem1),
            "all" => Some(SuiteName::All),
            _ => None,
        }
    }

    pub const TOKENS: [&'static str; 7] = [
        "kernel",
        "shifts",
        "paper-example",
        "dichotomy",
        "corollary",
        "theorem1",
        "all",
    ];
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::Kernel => "kernel",
            SuiteName::Shifts => "shifts",
            SuiteName::PaperExample => "paper-example",
            SuiteName::Dichotomy => "dichotomy",
            SuiteName::Corollary => "corollary",
            SuiteName::Theorem1 => "theorem1",
            SuiteName::All => "all",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub records: Vec<ResultRecord>,
    pub all_pass: bool,
}

struct Ctx {
    suite: &'static str,
    details: BTreeMap<String, String>,
    wall_clock: bool,
    records: Vec<ResultRecord>,
}

impl Ctx {
    fn new(suite: &'static str, config: &ExperimentConfig) -> Self {
        let mut details = BTreeMap::new();
        details.insert("alpha".into(), "1".into());
        details.insert("plateau".into(), format!("{}", config.thresholds.plateau));
        details.insert("slope".into(), format!("{}", config.thresholds.slope));
        details.insert(
            "annulus_trigger".into(),
            format!("{}", config.thresholds.annulus_trigger),
        );
        details.insert(
            "ratio_band".into(),
            format!(
                "[{},{}]",
                config.thresholds.ratio_band[0], config.thresholds.ratio_band[1]
            ),
        );
        Ctx {
            suite,
            details,
            wall_clock: config.output.timing == "wall",
            records: Vec::new(),
        }
    }

    fn push(
        &mut self,
        check: &str,
        value: f64,
        expected: f64,
        tolerance: f64,
        pass: bool,
        started: Instant,
    ) {
        let runtime_ms = if self.wall_clock {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        self.records.push(ResultRecord {
            suite: self.suite.to_string(),
            check: check.to_string(),
            status: if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            value,
            expected,
            tolerance,
            runtime_ms,
            details: self.details.clone(),
        });
    }

    /// value must sit within `rtol` of a nonzero expected value.
    fn check_rel(&mut self, check: &str, value: f64, expected: f64, rtol: f64, started: Instant) {
        let pass = value.is_finite() && (value - expected).abs() <= rtol * expected.abs();
        self.push(check, value, expected, rtol, pass, started);
    }

    /// `value` is an error magnitude that must not exceed `tol`.
    fn check_err(&mut self, check: &str, value: f64, tol: f64, started: Instant) {
        let pass = value.is_finite() && value.abs() <= tol;
        self.push(check, value, 0.0, tol, pass, started);
    }

    /// Boolean verdict encoded as 1 matched / 0 not.
    fn check_flag(&mut self, check: &str, ok: bool, started: Instant) {
        self.push(check, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, ok, started);
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly_re(coeffs: &[f64]) -> Poly {
    Poly::new(coeffs.iter().map(|&x| c(x, 0.0)).collect())
}

fn pair_z_half() -> SymbolPair {
    SymbolPair::with_psi(Poly::identity(), Poly::monomial(c(0.5, 0.0), 1))
}

/// Runs one named suite (or all of them) against the config's thresholds.
pub fn run_suite(name: SuiteName, config: &ExperimentConfig) -> SuiteOutcome {
    run_suites(&[name], config)
}

/// Runs a list of suites in order; an empty list yields an empty passing
/// report. A check failure never aborts sibling checks.
pub fn run_suites(names: &[SuiteName], config: &ExperimentConfig) -> SuiteOutcome {
    let mut expanded = Vec::new();
    for name in names {
        match name {
            SuiteName::All => expanded.extend([
                SuiteName::Kernel,
                SuiteName::Shifts,
                SuiteName::PaperExample,
                SuiteName::Dichotomy,
                SuiteName::Corollary,
                SuiteName::Theorem1,
            ]),
            single => expanded.push(*single),
        }
    }
    let mut records = Vec::new();
    for suite in expanded {
        let mut ctx = match suite {
            SuiteName::Kernel => kernel_suite(config),
            SuiteName::Shifts => shifts_suite(config),
            SuiteName::PaperExample => paper_example_suite(config),
            SuiteName::Dichotomy => dichotomy_suite(config),
            SuiteName::Corollary => corollary_suite(config),
            SuiteName::Theorem1 => theorem1_suite(config),
            SuiteName::All => unreachable!("expanded above"),
        };
        records.append(&mut ctx.records);
    }
    let all_pass = records.iter().all(|r| r.status == CheckStatus::Pass);
    SuiteOutcome { records, all_pass }
}

/// Kernel identities and the quadrature engine they rest on.
fn kernel_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("kernel", config);
    let params = FockParams::new(1.0);

    // Parseval on a degree-16 polynomial
    let t = Instant::now();
    let p = Poly::new(
        (0..=16)
            .map(|k| {
                let x = k as f64;
                c((x * 0.7).sin() + 0.1, (x * 1.3).cos() * 0.5)
            })
            .collect(),
    );
    let expanded = params.expand_in_basis(&p, 17).unwrap();
    ctx.check_rel("parseval-deg16", expanded.norm_sq(), params.norm_sq(&p), 1e-10, t);

    // reproducing property on monomials against the truncated kernel
    let t = Instant::now();
    let mut worst = 0.0f64;
    for m in 0..=10usize {
        let zm = Poly::monomial(c(1.0, 0.0), m);
        for i in 0..20 {
            let w = Complex64::from_polar(0.1 + 1.9 * ((i as f64 * 0.05) % 1.0), i as f64 * 0.37);
            let kernel_poly = Poly::new(
                (0..64)
                    .map(|k| {
                        params.basis_eval(k, w).conj()
                            * (-0.5 * crate::special::ln_factorial(k as u64)).exp()
                    })
                    .collect(),
            );
            let got = params.inner_product(&zm, &kernel_poly);
            let want = w.powu(m as u32);
            worst = worst.max((got - want).norm() / want.norm().max(1e-3));
        }
    }
    ctx.check_err("reproducing-monomials", worst, 1e-9, t);

    // ||K_w||² partial sums against e^{α|w|²}
    let t = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..12 {
        let w = Complex64::from_polar(2.0 * (i as f64 + 1.0) / 12.0, i as f64);
        let sum: f64 = (0..64).map(|n| params.basis_eval(n, w).norm_sqr()).sum();
        worst = worst.max((sum - w.norm_sqr().exp()).abs());
    }
    ctx.check_err("kernel-norm-partial-sums", worst, 1e-10, t);

    // derivative-kernel norm: closed form against the 80-term series
    let t = Instant::now();
    let mut worst = 0.0f64;
    for i in 1..=8 {
        let w = Complex64::from_polar(0.25 * i as f64, 0.9 * i as f64);
        let r2 = w.norm_sqr();
        let series: f64 = (1..=80)
            .map(|n| {
                let nf = n as f64;
                (2.0 * nf.ln() + (nf - 1.0) * r2.ln() - crate::special::ln_factorial(n as u64))
                    .exp()
            })
            .sum();
        let closed = params.dbar_kernel_norm_sq(w);
        worst = worst.max((closed - series).abs() / series);
    }
    ctx.check_err("dbar-closed-form-vs-series", worst, 1e-10, t);

    // quadrature engine: Gaussian mass
    let t = Instant::now();
    let grid = QuadratureGrid::gaussian(1.0, 1e-12, 2).unwrap();
    let gauss = grid
        .integrate(|z| (-z.norm_sqr()).exp())
        .unwrap()
        .value()
        .unwrap();
    ctx.check_err("quad-gaussian-pi", (gauss - std::f64::consts::PI).abs(), 1e-12, t);

    // quadrature engine: radial moment fixtures
    let t = Instant::now();
    let mut worst = 0.0f64;
    for &beta in &[0.75, 1.0, 2.0] {
        for m in 0..=6u32 {
            let grid = QuadratureGrid::gaussian(beta, 1e-12, 2 * m as usize).unwrap();
            let got = grid
                .integrate(|z| {
                    let r2 = z.norm_sqr();
                    (m as f64 * r2.ln() - beta * r2).exp()
                })
                .unwrap()
                .value()
                .unwrap();
            let want = std::f64::consts::PI * crate::special::ln_factorial(m as u64).exp()
                / beta.powi(m as i32 + 1);
            worst = worst.max((got - want).abs() / want);
        }
    }
    ctx.check_err("quad-gamma-moments", worst, 1e-10, t);

    // divergence prober on the two canonical non-integrable profiles
    let t = Instant::now();
    let settings = ProbeSettings {
        trigger_run: config.thresholds.annulus_trigger,
        ..ProbeSettings::default()
    };
    let constant = probe_divergence(|_| 1.0, &settings).unwrap();
    ctx.check_flag("quad-divergent-constant", !constant.is_finite(), t);

    let t = Instant::now();
    let inv_sq = probe_divergence(
        |z| {
            let d = 1.0 + z.norm();
            1.0 / (d * d)
        },
        &settings,
    )
    .unwrap();
    ctx.check_flag("quad-divergent-inverse-square", !inv_sq.is_finite(), t);

    ctx
}

/// Exact shift spectra and the two independent matrix paths.
fn shifts_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("shifts", config);
    let params = FockParams::new(1.0);
    let size = 64;

    for &(k, a, label) in &[
        (1usize, c(0.3, 0.0), "k1-a0.3"),
        (1, c(0.5, 0.0), "k1-a0.5"),
        (1, c(0.0, 0.5), "k1-a0.5i"),
        (2, c(0.3, 0.0), "k2-a0.3"),
        (2, c(0.5, 0.0), "k2-a0.5"),
        (2, c(0.0, 0.5), "k2-a0.5i"),
    ] {
        let t = Instant::now();
        let pair = SymbolPair::with_psi(Poly::monomial(c(1.0, 0.0), k), Poly::monomial(a, 1));
        let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair, params, size).unwrap();
        let got = singular_values(&op);
        let mut expected: Vec<f64> = (0..size)
            .map(|n| {
                if n + k < size {
                    shift_weight(k, c(1.0, 0.0), a, params, n)
                } else {
                    0.0 // image falls past the truncation
                }
            })
            .collect();
        expected.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let mut worst = 0.0f64;
        for (s, e) in got.values().iter().zip(expected.iter()) {
            let scale = e.abs().max(1e-280);
            worst = worst.max((s - e).abs() / scale);
        }
        ctx.check_err(&format!("shift-oracle-{label}"), worst, 1e-10, t);
    }

    // exact vs quadrature entries on degree <= 4 fixtures at N = 16
    let t = Instant::now();
    let size = 16;
    let grid = QuadratureGrid::gaussian(1.0, 1e-12, 2 * size + 6).unwrap();
    let fixtures: Vec<(OperatorKind, SymbolPair)> = vec![
        (OperatorKind::Vg, SymbolPair::without_psi(poly_re(&[1.0, 1.0]))),
        (OperatorKind::Ig, SymbolPair::without_psi(poly_re(&[0.0, 0.0, 1.0]))),
        (OperatorKind::Mg, SymbolPair::without_psi(poly_re(&[1.0, 1.0]))),
        (
            OperatorKind::IgPsi,
            SymbolPair::with_psi(poly_re(&[0.0, 0.0, 1.0]), Poly::monomial(c(0.5, 0.0), 1)),
        ),
        (
            OperatorKind::CgPsi,
            SymbolPair::with_psi(
                Poly::identity(),
                Poly::new(vec![c(0.0, 0.2), c(0.3, 0.0)]),
            ),
        ),
        (
            OperatorKind::VgUpperPsi,
            SymbolPair::with_psi(poly_re(&[0.0, 0.0, 1.0]), Poly::monomial(c(0.5, 0.0), 1)),
        ),
        (
            OperatorKind::CgUpperPsi,
            SymbolPair::with_psi(poly_re(&[1.0, 1.0]), Poly::monomial(c(0.25, 0.0), 1)),
        ),
    ];
    let mut worst = 0.0f64;
    for (kind, pair) in &fixtures {
        let exact = TruncatedOperator::build(*kind, pair, params, size).unwrap();
        let quad =
            TruncatedOperator::build_by_quadrature(*kind, pair, params, size, &grid, 1e-9)
                .unwrap();
        worst = worst.max(exact.max_abs_difference(&quad));
    }
    ctx.check_err("cross-path-entries-n16", worst, 1e-8, t);

    // integration-by-parts identity on the unleaked block, g = 1 + z
    let t = Instant::now();
    let size = 32;
    let g = poly_re(&[1.0, 1.0]);
    let pair = SymbolPair::without_psi(g.clone());
    let v = TruncatedOperator::build(OperatorKind::Vg, &pair, params, size).unwrap();
    let i = TruncatedOperator::build(OperatorKind::Ig, &pair, params, size).unwrap();
    let m = TruncatedOperator::build(OperatorKind::Mg, &pair, params, size).unwrap();
    let block = size - 1 - g.degree().unwrap();
    let g0 = g.eval(Complex64::ZERO);
    let mut worst = 0.0f64;
    for col in 0..=block {
        for row in 0..=block {
            let correction = if row == 0 && col == 0 { g0 } else { Complex64::ZERO };
            let lhs = v.entry(row, col) + i.entry(row, col);
            let rhs = m.entry(row, col) - correction;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    ctx.check_err("parts-identity-block", worst, 1e-12, t);

    ctx
}

/// The worked example: the one symbol pair the theory computes by hand.
fn paper_example_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("paper-example", config);
    let params = FockParams::new(1.0);
    let order = SchattenOrder::new(2.0).unwrap();
    let pair = pair_z_half();

    // ∫ |z|² e^{-(3/4)|z|²} dm = 16π/9
    let t = Instant::now();
    let integral = criterion_integral(TransformWhich::ForI, &pair, params, order, 1e-10)
        .unwrap()
        .value()
        .unwrap_or(f64::NAN);
    ctx.check_rel(
        "criterion-value",
        integral,
        16.0 * std::f64::consts::PI / 9.0,
        1e-6,
        t,
    );

    let t = Instant::now();
    let verdict = classify_symbolic(&pair).unwrap();
    ctx.check_flag("classify-member", verdict.is_member(), t);

    let t = Instant::now();
    let report = convergence_diagnose(
        OperatorKind::IgPsi,
        &pair,
        params,
        order,
        &[32, 64, 128],
        config.thresholds.diagnostics(),
    )
    .unwrap();
    ctx.check_flag(
        "convergence-verdict",
        report.verdict == ConvergenceVerdict::Converged,
        t,
    );
    let t = Instant::now();
    let mut max_diff = 0.0f64;
    for w in report.power_sums.windows(2) {
        max_diff = max_diff.max((w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE));
    }
    ctx.check_err("plateau-diffs", max_diff, config.thresholds.plateau, t);

    // homogeneity: g → c·g leaves ||·||²_{S2} / criterion invariant
    let scalings: Vec<Complex64> = config
        .sweep
        .c_scalings
        .iter()
        .map(|s| parse_complex(s).expect("validated"))
        .collect();
    let a_values: Vec<Complex64> = config
        .sweep
        .a_values
        .iter()
        .map(|s| parse_complex(s).expect("validated"))
        .collect();
    for (ai, &a) in a_values.iter().enumerate() {
        let t = Instant::now();
        let psi = Poly::monomial(a, 1);
        let ratio_for = |g: Poly| -> f64 {
            let pair = SymbolPair::with_psi(g, psi.clone());
            let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair, params, 128).unwrap();
            let s2 = singular_values(&op).power_sum(order);
            let integral = criterion_integral(TransformWhich::ForI, &pair, params, order, 1e-10)
                .unwrap()
                .value()
                .unwrap_or(f64::NAN);
            s2 / integral
        };
        let base = ratio_for(Poly::identity());
        let mut worst = 0.0f64;
        for &scale in &scalings {
            let scaled = ratio_for(Poly::identity().scale(scale));
            worst = worst.max((scaled - base).abs() / base.abs());
        }
        let label = config
            .sweep
            .a_values
            .get(ai)
            .cloned()
            .unwrap_or_else(|| format!("{a}"));
        ctx.check_err(&format!("scaling-invariance-a{label}"), worst, 1e-10, t);
    }

    ctx
}

/// The rigidity and dichotomy claims for the classical pair V_g, I_g.
fn dichotomy_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("dichotomy", config);
    let params = FockParams::new(1.0);
    let thresholds = config.thresholds.diagnostics();
    let z_pair = SymbolPair::without_psi(Poly::identity());

    // companion with g = z never reaches any Schatten class
    let t = Instant::now();
    let order2 = SchattenOrder::new(2.0).unwrap();
    let report = convergence_diagnose(
        OperatorKind::Ig,
        &z_pair,
        params,
        order2,
        &[32, 64, 128, 256],
        thresholds,
    )
    .unwrap();
    ctx.check_flag(
        "companion-z-diverging",
        report.verdict == ConvergenceVerdict::Diverging,
        t,
    );

    let t = Instant::now();
    let size = 256;
    let op = TruncatedOperator::build(OperatorKind::Ig, &z_pair, params, size).unwrap();
    let top = singular_values(&op).largest();
    let ratio = top / ((size as f64 - 1.0).sqrt());
    ctx.push("companion-z-top-singular", ratio, 1.0, 0.1, (ratio - 1.0).abs() <= 0.1, t);

    let t = Instant::now();
    let identity_pair = SymbolPair::with_psi(Poly::identity(), Poly::identity());
    let verdict = classify_symbolic(&identity_pair).unwrap();
    ctx.check_flag("classify-identity-psi", !verdict.is_member(), t);

    // V_z singular values are exactly (n+1)^{-1/2}
    let t = Instant::now();
    let op = TruncatedOperator::build(OperatorKind::Vg, &z_pair, params, size).unwrap();
    let spectrum = singular_values(&op);
    let mut expected: Vec<f64> = (1..size).map(|n| 1.0 / (n as f64).sqrt()).collect();
    expected.push(0.0);
    expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut worst = 0.0f64;
    for (s, e) in spectrum.values().iter().zip(expected.iter()) {
        worst = worst.max((s - e).abs() / e.max(1e-10));
    }
    ctx.check_err("volterra-z-exact-singulars", worst, 1e-10, t);

    // S₄⁴ partial sum is the truncated ζ(2) sum
    let t = Instant::now();
    let order4 = SchattenOrder::new(4.0).unwrap();
    let s4 = spectrum.power_sum(order4);
    let zeta_trunc: f64 = (1..size).map(|n| 1.0 / ((n * n) as f64)).sum();
    ctx.check_err("volterra-z-s4-zeta2", (s4 - zeta_trunc).abs(), 1e-10, t);

    // while the p = 2 sums grow without plateau
    let t = Instant::now();
    let report = convergence_diagnose(
        OperatorKind::Vg,
        &z_pair,
        params,
        order2,
        &[64, 128, 256],
        thresholds,
    )
    .unwrap();
    ctx.check_flag(
        "volterra-z-s2-diverging",
        report.verdict == ConvergenceVerdict::Diverging,
        t,
    );

    ctx
}

/// One-directional implication between the companion and Volterra families.
fn corollary_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("corollary", config);
    let params = FockParams::new(1.0);
    let thresholds = config.thresholds.diagnostics();

    let t = Instant::now();
    let order2 = SchattenOrder::new(2.0).unwrap();
    let member = companion_comparison(&pair_z_half(), params, order2, &[32, 64, 128], thresholds)
        .unwrap();
    ctx.check_flag(
        "member-pair-both-converged",
        member.companion.verdict == ConvergenceVerdict::Converged
            && member.volterra.verdict == ConvergenceVerdict::Converged,
        t,
    );

    let t = Instant::now();
    let order3 = SchattenOrder::new(3.0).unwrap();
    let identity_pair = SymbolPair::with_psi(Poly::identity(), Poly::identity());
    let converse =
        companion_comparison(&identity_pair, params, order3, &[64, 128, 256], thresholds)
            .unwrap();
    ctx.check_flag(
        "converse-failure-v-converged",
        converse.volterra.verdict == ConvergenceVerdict::Converged,
        t,
    );

    let t = Instant::now();
    let mut worst = 0.0f64;
    for (i, &n) in converse.volterra.sizes.iter().enumerate() {
        let zeta_trunc: f64 = (1..n).map(|m| (m as f64).powf(-1.5)).sum();
        worst = worst.max((converse.volterra.power_sums[i] - zeta_trunc).abs());
    }
    ctx.check_err("converse-failure-v-zeta32", worst, 1e-8, t);

    let t = Instant::now();
    ctx.check_flag(
        "converse-failure-i-diverging",
        converse.companion.verdict == ConvergenceVerdict::Diverging,
        t,
    );

    let t = Instant::now();
    ctx.check_flag(
        "implication-holds",
        member.companion_implies_volterra && converse.companion_implies_volterra,
        t,
    );

    ctx
}

/// Berezin-integral membership test and its ratio to the Schatten norm.
fn theorem1_suite(config: &ExperimentConfig) -> Ctx {
    let mut ctx = Ctx::new("theorem1", config);
    let params = FockParams::new(1.0);
    let order = SchattenOrder::new(2.0).unwrap();
    let band = config.thresholds.ratio_band;
    let outer = ProbeSettings {
        radial_nodes: 10,
        angular_nodes: 16,
        doublings: 8,
        trigger_run: config.thresholds.annulus_trigger,
        ..ProbeSettings::default()
    };

    let t = Instant::now();
    let outcome = berezin_lp_integral(
        TransformWhich::ForI,
        &pair_z_half(),
        params,
        order,
        &outer,
        1e-7,
    )
    .unwrap();
    ctx.check_flag("berezin-lp-finite", outcome.result.is_finite(), t);

    let t = Instant::now();
    let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair_z_half(), params, 128).unwrap();
    let s2_sq = singular_values(&op).power_sum(order);
    let ratio = outcome.result.value().unwrap_or(f64::NAN) / s2_sq;
    ctx.push(
        "berezin-ratio-band",
        ratio,
        1.0,
        band[1],
        ratio.is_finite() && ratio > band[0] && ratio < band[1],
        t,
    );

    let t = Instant::now();
    let identity_pair = SymbolPair::with_psi(Poly::one(), Poly::identity());
    let divergent = berezin_lp_integral(
        TransformWhich::ForI,
        &identity_pair,
        params,
        order,
        &outer,
        1e-6,
    )
    .unwrap();
    ctx.check_flag("berezin-lp-divergent", !divergent.result.is_finite(), t);

    // norm-domination ratios stay inside the recorded band
    let t = Instant::now();
    let f = Poly::monomial(c(1.0, 0.0), 2);
    let mut worst: f64 = 1.0;
    let mut all_in_band = true;
    for &a in &[0.3, 0.5] {
        let pair = SymbolPair::with_psi(Poly::identity(), Poly::monomial(c(a, 0.0), 1));
        let ratio = domination_ratio(&pair, params, &f, 1e-6).unwrap_or(f64::NAN);
        all_in_band &= ratio.is_finite() && ratio > band[0] && ratio < band[1];
        if !ratio.is_finite() || (ratio.ln().abs() > worst.ln().abs()) {
            worst = ratio;
        }
    }
    ctx.push("domination-ratio-band", worst, 1.0, band[1], all_in_band, t);

    // forward/reverse moment comparison ratios stay inside the band too
    let t = Instant::now();
    let mut worst: f64 = 1.0;
    let mut all_in_band = true;
    for &a in &[0.3, 0.5] {
        let pair = SymbolPair::with_psi(Poly::identity(), Poly::monomial(c(a, 0.0), 1));
        for &p in &[1.5, 3.0] {
            let order = SchattenOrder::new(p).unwrap();
            for i in 0..3 {
                let w = Complex64::from_polar(0.5 + i as f64, 0.8 * i as f64);
                let ratio = moment_comparison_ratio(&pair, params, order, w, 1e-7)
                    .unwrap_or(f64::NAN);
                all_in_band &= ratio.is_finite() && ratio > band[0] && ratio < band[1];
                if !ratio.is_finite() || ratio.ln().abs() > worst.ln().abs() {
                    worst = ratio;
                }
            }
        }
    }
    ctx.push("moment-ratio-band", worst, 1.0, band[1], all_in_band, t);

    // the exact image of a basis element cross-checks the domination LHS
    let t = Instant::now();
    let image = apply_operator(OperatorKind::IgPsi, &pair_z_half(), &f).unwrap();
    let lhs = params.norm_sq(&image);
    ctx.check_flag("domination-lhs-positive", lhs > 0.0 && lhs.is_finite(), t);

    ctx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for token in SuiteName::TOKENS {
            let name = SuiteName::parse(token).unwrap();
            assert_eq!(name.to_string(), token);
        }
        assert!(SuiteName::parse("bogus").is_none());
    }

    #[test]
    fn empty_suite_list_is_an_empty_pass() {
        let outcome = run_suites(&[], &ExperimentConfig::default());
        assert!(outcome.all_pass);
        assert!(outcome.records.is_empty());
    }

    #[test]
    fn kernel_suite_passes_with_defaults() {
        let outcome = run_suite(SuiteName::Kernel, &ExperimentConfig::default());
        assert!(
            outcome.all_pass,
            "failing checks: {:?}",
            outcome
                .records
                .iter()
                .filter(|r| r.status == CheckStatus::Fail)
                .map(|r| &r.check)
                .collect::<Vec<_>>()
        );
        assert!(outcome.records.len() >= 8);
    }

    #[test]
    fn records_echo_thresholds() {
        let outcome = run_suite(SuiteName::Kernel, &ExperimentConfig::default());
        for r in &outcome.records {
            assert_eq!(r.details.get("plateau").map(String::as_str), Some("0.00000001"));
            assert!(r.details.contains_key("ratio_band"));
        }
    }

    #[test]
    fn timing_suppressed_by_default() {
        let outcome = run_suite(SuiteName::Kernel, &ExperimentConfig::default());
        assert!(outcome.records.iter().all(|r| r.runtime_ms == 0));
    }
}
