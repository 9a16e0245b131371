//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured values once its assertions hold. Tolerances are pinned in
//! the assertions themselves.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use focklab::criteria::{
    berezin_lp_integral, classify_symbolic, companion_comparison, criterion_integral,
    TransformWhich,
};
use focklab::fock::FockParams;
use focklab::harness::{run_suite, ExperimentConfig, SuiteName};
use focklab::operator::{shift_weight, OperatorKind, SymbolPair, TruncatedOperator};
use focklab::poly::Poly;
use focklab::quadrature::{probe_divergence, ProbeSettings, QuadratureGrid};
use focklab::spectrum::{
    convergence_diagnose, singular_values, ConvergenceVerdict, DiagnosticThresholds, SchattenOrder,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real_poly(coeffs: &[f64]) -> Poly {
    Poly::new(coeffs.iter().map(|&x| c(x, 0.0)).collect())
}

fn pair_z_half() -> SymbolPair {
    SymbolPair::with_psi(Poly::identity(), Poly::monomial(c(0.5, 0.0), 1))
}

#[test]
fn criterion_01_paper_worked_example() {
    let started = Instant::now();
    let params = FockParams::new(1.0);
    let order = SchattenOrder::new(2.0).unwrap();
    let pair = pair_z_half();

    let integral = criterion_integral(TransformWhich::ForI, &pair, params, order, 1e-10).unwrap();
    let value = integral.value().expect("criterion integral must be finite");
    let want = 16.0 * PI / 9.0;
    assert!(
        (value - want).abs() / want < 1e-6,
        "criterion value {value} vs {want}"
    );

    let verdict = classify_symbolic(&pair).unwrap();
    assert!(verdict.is_member(), "classifier must report membership");

    let report = convergence_diagnose(
        OperatorKind::IgPsi,
        &pair,
        params,
        order,
        &[32, 64, 128],
        DiagnosticThresholds::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, ConvergenceVerdict::Converged);
    for w in report.power_sums.windows(2) {
        let rel = (w[1] - w[0]).abs() / w[1].abs();
        assert!(rel < 1e-8, "successive power sums differ by {rel}");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "acceptance 01 paper-worked-example: PASS (value={value:.9}, target 16π/9={want:.9}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_shift_oracle_exactness() {
    let started = Instant::now();
    let params = FockParams::new(1.0);
    let size = 64;
    for &k in &[1usize, 2] {
        for &a in &[c(0.3, 0.0), c(0.5, 0.0), c(0.0, 0.5)] {
            let pair =
                SymbolPair::with_psi(Poly::monomial(c(1.0, 0.0), k), Poly::monomial(a, 1));
            let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair, params, size).unwrap();
            let got = singular_values(&op);
            let mut expected: Vec<f64> = (0..size)
                .map(|n| {
                    if n + k < size {
                        shift_weight(k, c(1.0, 0.0), a, params, n)
                    } else {
                        0.0
                    }
                })
                .collect();
            expected.sort_by(|x, y| y.partial_cmp(x).unwrap());
            for (s, e) in got.values().iter().zip(expected.iter()) {
                assert!(
                    (s - e).abs() <= 1e-10 * e.max(1e-280),
                    "k={k} a={a}: singular value {s} vs oracle {e}"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("acceptance 02 shift-oracle-exactness: PASS (k in {{1,2}}, 3 slopes, N=64, {elapsed:?})");
}

#[test]
fn criterion_03_companion_rigidity() {
    let params = FockParams::new(1.0);
    let pair = SymbolPair::without_psi(Poly::identity());
    let order = SchattenOrder::new(2.0).unwrap();

    let report = convergence_diagnose(
        OperatorKind::Ig,
        &pair,
        params,
        order,
        &[32, 64, 128, 256],
        DiagnosticThresholds::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, ConvergenceVerdict::Diverging);

    let size = 256;
    let op = TruncatedOperator::build(OperatorKind::Ig, &pair, params, size).unwrap();
    let top = singular_values(&op).largest();
    let expected = (size as f64 - 1.0).sqrt();
    assert!(
        (top / expected - 1.0).abs() <= 0.1,
        "largest singular value {top} vs sqrt(N-1) {expected}"
    );

    let identity_pair = SymbolPair::with_psi(Poly::identity(), Poly::identity());
    assert!(!classify_symbolic(&identity_pair).unwrap().is_member());

    println!(
        "acceptance 03 companion-rigidity: PASS (diverging, top singular {top:.4} ~ {expected:.4})"
    );
}

#[test]
fn criterion_04_volterra_dichotomy() {
    let params = FockParams::new(1.0);
    let pair = SymbolPair::without_psi(Poly::identity());
    let size = 256;

    let op = TruncatedOperator::build(OperatorKind::Vg, &pair, params, size).unwrap();
    let spectrum = singular_values(&op);
    let mut expected: Vec<f64> = (1..size).map(|n| 1.0 / (n as f64).sqrt()).collect();
    expected.push(0.0);
    expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (s, e) in spectrum.values().iter().zip(expected.iter()) {
        assert!(
            (s - e).abs() <= 1e-10 * e.max(1e-12),
            "singular value {s} vs (n+1)^(-1/2) value {e}"
        );
    }

    let order4 = SchattenOrder::new(4.0).unwrap();
    let s4 = spectrum.power_sum(order4);
    let zeta2_trunc: f64 = (1..size).map(|n| 1.0 / ((n * n) as f64)).sum();
    assert!(
        (s4 - zeta2_trunc).abs() < 1e-10,
        "S4^4 {s4} vs truncated zeta(2) {zeta2_trunc} (limit pi^2/6 = {})",
        PI * PI / 6.0
    );

    let order2 = SchattenOrder::new(2.0).unwrap();
    let report = convergence_diagnose(
        OperatorKind::Vg,
        &pair,
        params,
        order2,
        &[64, 128, 256],
        DiagnosticThresholds::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, ConvergenceVerdict::Diverging);

    println!(
        "acceptance 04 volterra-dichotomy: PASS (S4^4={s4:.12} -> pi^2/6, S2^2 diverging: membership iff p > 2)"
    );
}

#[test]
fn criterion_05_companion_family_implication() {
    let params = FockParams::new(1.0);
    let thresholds = DiagnosticThresholds::default();

    let order2 = SchattenOrder::new(2.0).unwrap();
    let member =
        companion_comparison(&pair_z_half(), params, order2, &[32, 64, 128], thresholds).unwrap();
    assert_eq!(member.companion.verdict, ConvergenceVerdict::Converged);
    assert_eq!(member.volterra.verdict, ConvergenceVerdict::Converged);

    let order3 = SchattenOrder::new(3.0).unwrap();
    let identity_pair = SymbolPair::with_psi(Poly::identity(), Poly::identity());
    let converse =
        companion_comparison(&identity_pair, params, order3, &[64, 128, 256], thresholds).unwrap();
    assert_eq!(converse.volterra.verdict, ConvergenceVerdict::Converged);
    assert_eq!(converse.companion.verdict, ConvergenceVerdict::Diverging);
    let zeta_32 = 2.612375348685488;
    for (i, &n) in converse.volterra.sizes.iter().enumerate() {
        let zeta_trunc: f64 = (1..n).map(|m| (m as f64).powf(-1.5)).sum();
        assert!(
            (converse.volterra.power_sums[i] - zeta_trunc).abs() < 1e-8,
            "N={n}: power sum {} vs truncated zeta(3/2) {zeta_trunc}",
            converse.volterra.power_sums[i]
        );
    }
    assert!(member.companion_implies_volterra && converse.companion_implies_volterra);

    println!(
        "acceptance 05 companion-family-implication: PASS (volterra sums -> zeta(3/2)={zeta_32:.9}, converse failure witnessed)"
    );
}

#[test]
fn criterion_06_scaling_ratio_invariance() {
    let params = FockParams::new(1.0);
    let order = SchattenOrder::new(2.0).unwrap();
    let ratio_for = |g: Poly, a: f64| -> f64 {
        let pair = SymbolPair::with_psi(g, Poly::monomial(c(a, 0.0), 1));
        let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair, params, 128).unwrap();
        let s2 = singular_values(&op).power_sum(order);
        let integral = criterion_integral(TransformWhich::ForI, &pair, params, order, 1e-10)
            .unwrap()
            .value()
            .unwrap();
        s2 / integral
    };
    for &a in &[0.3, 0.5, 0.7] {
        let base = ratio_for(Poly::identity(), a);
        for &scale in &[c(2.0, 0.0), c(0.0, 5.0)] {
            let scaled = ratio_for(Poly::identity().scale(scale), a);
            assert!(
                (scaled - base).abs() / base.abs() < 1e-10,
                "a={a} c={scale}: ratio {scaled} vs {base}"
            );
        }
    }
    println!("acceptance 06 scaling-ratio-invariance: PASS (a in {{0.3,0.5,0.7}}, c in {{2,5i}})");
}

#[test]
fn criterion_07_berezin_lp_consistency() {
    let params = FockParams::new(1.0);
    let order = SchattenOrder::new(2.0).unwrap();
    let outer = ProbeSettings {
        radial_nodes: 10,
        angular_nodes: 16,
        doublings: 8,
        ..ProbeSettings::default()
    };

    let finite = berezin_lp_integral(
        TransformWhich::ForI,
        &pair_z_half(),
        params,
        order,
        &outer,
        1e-7,
    )
    .unwrap();
    let value = finite.result.value().expect("must be finite");
    let op = TruncatedOperator::build(OperatorKind::IgPsi, &pair_z_half(), params, 128).unwrap();
    let s2_sq = singular_values(&op).power_sum(order);
    let ratio = value / s2_sq;
    assert!(
        ratio > 1e-3 && ratio < 1e3,
        "Berezin integral / S2^2 ratio {ratio} outside recorded band"
    );

    let divergent_pair = SymbolPair::with_psi(Poly::one(), Poly::identity());
    let divergent = berezin_lp_integral(
        TransformWhich::ForI,
        &divergent_pair,
        params,
        order,
        &outer,
        1e-6,
    )
    .unwrap();
    assert!(!divergent.result.is_finite());

    println!("acceptance 07 berezin-lp-consistency: PASS (finite value {value:.6}, ratio {ratio:.3} in band, identity-psi divergent)");
}

#[test]
fn criterion_08_quadrature_engine() {
    let grid = QuadratureGrid::gaussian(1.0, 1e-12, 2).unwrap();
    let gauss = grid
        .integrate(|z| (-z.norm_sqr()).exp())
        .unwrap()
        .value()
        .unwrap();
    assert!((gauss - PI).abs() < 1e-12, "Gaussian mass {gauss}");

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
            let mut factorial = 1.0f64;
            for i in 1..=m as u64 {
                factorial *= i as f64;
            }
            let want = PI * factorial / beta.powi(m as i32 + 1);
            assert!(
                (got - want).abs() / want < 1e-10,
                "beta={beta} m={m}: {got} vs {want}"
            );
        }
    }

    let settings = ProbeSettings::default();
    assert!(!probe_divergence(|_| 1.0, &settings).unwrap().is_finite());
    assert!(!probe_divergence(
        |z| {
            let d = 1.0 + z.norm();
            1.0 / (d * d)
        },
        &settings
    )
    .unwrap()
    .is_finite());

    println!("acceptance 08 quadrature-engine: PASS (pi to 1e-12, gamma moments to 1e-10, divergents flagged)");
}

#[test]
fn criterion_09_cross_path_agreement() {
    let params = FockParams::new(1.0);
    let size = 16;
    let grid = QuadratureGrid::gaussian(1.0, 1e-12, 2 * size + 6).unwrap();
    let fixtures: Vec<(OperatorKind, SymbolPair)> = vec![
        (OperatorKind::Vg, SymbolPair::without_psi(real_poly(&[1.0, 1.0]))),
        (OperatorKind::Ig, SymbolPair::without_psi(real_poly(&[0.0, 0.0, 1.0]))),
        (OperatorKind::Mg, SymbolPair::without_psi(real_poly(&[1.0, 1.0]))),
        (
            OperatorKind::IgPsi,
            SymbolPair::with_psi(real_poly(&[0.0, 0.0, 1.0]), Poly::monomial(c(0.5, 0.0), 1)),
        ),
        (
            OperatorKind::CgPsi,
            SymbolPair::with_psi(Poly::identity(), Poly::new(vec![c(0.0, 0.2), c(0.3, 0.0)])),
        ),
        (
            OperatorKind::VgUpperPsi,
            SymbolPair::with_psi(real_poly(&[0.0, 0.0, 0.0, 1.0]), Poly::monomial(c(0.5, 0.0), 1)),
        ),
        (
            OperatorKind::CgUpperPsi,
            SymbolPair::with_psi(real_poly(&[1.0, 1.0]), Poly::monomial(c(0.25, 0.0), 1)),
        ),
    ];
    for (kind, pair) in &fixtures {
        let exact = TruncatedOperator::build(*kind, pair, params, size).unwrap();
        let quad =
            TruncatedOperator::build_by_quadrature(*kind, pair, params, size, &grid, 1e-9)
                .unwrap();
        let diff = exact.max_abs_difference(&quad);
        assert!(diff < 1e-8, "{kind}: max entry difference {diff}");
    }

    // integration-by-parts identity on the unleaked block
    let size = 32;
    let g = real_poly(&[1.0, 1.0]);
    let pair = SymbolPair::without_psi(g.clone());
    let v = TruncatedOperator::build(OperatorKind::Vg, &pair, params, size).unwrap();
    let i = TruncatedOperator::build(OperatorKind::Ig, &pair, params, size).unwrap();
    let m = TruncatedOperator::build(OperatorKind::Mg, &pair, params, size).unwrap();
    let block = size - 1 - g.degree().unwrap();
    let g0 = g.eval(Complex64::ZERO);
    for col in 0..=block {
        for row in 0..=block {
            let correction = if row == 0 && col == 0 { g0 } else { Complex64::ZERO };
            let lhs = v.entry(row, col) + i.entry(row, col);
            let rhs = m.entry(row, col) - correction;
            assert!(
                (lhs - rhs).norm() < 1e-12,
                "identity violated at ({row},{col}): {lhs} vs {rhs}"
            );
        }
    }

    println!("acceptance 09 cross-path-agreement: PASS (7 fixtures to 1e-8, parts identity to 1e-12)");
}

#[test]
fn criterion_10_kernel_identities_and_full_verify() {
    let params = FockParams::new(1.0);

    // Parseval at 1e-10 relative
    let p = Poly::new(
        (0..=16)
            .map(|k| {
                let x = k as f64;
                c((x * 0.7).sin() + 0.1, (x * 1.3).cos() * 0.5)
            })
            .collect(),
    );
    let expanded = params.expand_in_basis(&p, 17).unwrap();
    let direct = params.norm_sq(&p);
    assert!((expanded.norm_sq() - direct).abs() / direct < 1e-10);

    // reproducing property at 1e-9 relative
    for m in 0..=10usize {
        let zm = Poly::monomial(c(1.0, 0.0), m);
        for i in 0..20 {
            let w = Complex64::from_polar(0.1 + 1.9 * ((i as f64 * 0.05) % 1.0), i as f64 * 0.37);
            let kernel_poly = Poly::new(
                (0..64)
                    .map(|k| {
                        params.basis_eval(k, w).conj()
                            * (-0.5 * focklab::special::ln_factorial(k as u64)).exp()
                    })
                    .collect(),
            );
            let got = params.inner_product(&zm, &kernel_poly);
            let want = w.powu(m as u32);
            assert!(
                (got - want).norm() <= 1e-9 * want.norm().max(1e-3),
                "reproducing failure at m={m}, w={w}"
            );
        }
    }

    // kernel norm partial sums at 1e-10 absolute
    for i in 0..12 {
        let w = Complex64::from_polar(2.0 * (i as f64 + 1.0) / 12.0, i as f64);
        let sum: f64 = (0..64).map(|n| params.basis_eval(n, w).norm_sqr()).sum();
        assert!((sum - w.norm_sqr().exp()).abs() < 1e-10);
    }

    // derivative-kernel norm closed form vs 80-term series at 1e-10 relative
    for i in 1..=8 {
        let w = Complex64::from_polar(0.25 * i as f64, 0.9 * i as f64);
        let r2 = w.norm_sqr();
        let series: f64 = (1..=80)
            .map(|n| {
                let nf = n as f64;
                (2.0 * nf.ln() + (nf - 1.0) * r2.ln() - focklab::special::ln_factorial(n as u64))
                    .exp()
            })
            .sum();
        let closed = params.dbar_kernel_norm_sq(w);
        assert!((closed - series).abs() / series < 1e-10);
    }

    // the whole verification battery stays inside the single-core budget
    let started = Instant::now();
    let outcome = run_suite(SuiteName::All, &ExperimentConfig::default());
    let elapsed = started.elapsed();
    assert!(
        outcome.all_pass,
        "failing checks: {:?}",
        outcome
            .records
            .iter()
            .filter(|r| r.status != focklab::harness::CheckStatus::Pass)
            .map(|r| format!("{}/{}", r.suite, r.check))
            .collect::<Vec<_>>()
    );
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "full verify took {elapsed:?}"
    );

    println!(
        "acceptance 10 kernel-identities-and-full-verify: PASS ({} checks in {elapsed:?})",
        outcome.records.len()
    );
}
