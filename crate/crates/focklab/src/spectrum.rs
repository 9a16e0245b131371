//! Singular values, Schatten (quasi-)norms, and convergence diagnostics of
//! truncated operators across growing matrix sizes.
//!
//! Singular values come from a cyclic complex-Jacobi eigensolver on the Gram
//! matrix `T*T`. Desk-scale truncations (N <= 512) make dense decomposition
//! cheap, and the shift-structured fixtures of interest have an exactly
//! diagonal Gram matrix, where Jacobi terminates after one scan.

use std::fmt;

use num_complex::Complex64;

use crate::fock::FockParams;
use crate::operator::{OperatorError, OperatorKind, SymbolPair, TruncatedOperator};

/// Exponent of a Schatten class; `p < 1` only gives a quasi-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchattenOrder {
    p: f64,
}

impl SchattenOrder {
    pub fn new(p: f64) -> Result<Self, SpectrumError> {
        if !(p.is_finite() && p > 0.0) {
            return Err(SpectrumError::InvalidOrder(p));
        }
        Ok(SchattenOrder { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// True when the triangle inequality is unavailable.
    pub fn is_quasi_norm(&self) -> bool {
        self.p < 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumError {
    InvalidOrder(f64),
    /// Truncation schedules must be strictly increasing with >= 3 sizes.
    BadSchedule(Vec<usize>),
    Operator(OperatorError),
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::InvalidOrder(p) => {
                write!(f, "Schatten order must be a positive real, got {p}")
            }
            SpectrumError::BadSchedule(ns) => write!(
                f,
                "truncation schedule must be strictly increasing with at least 3 sizes, got {ns:?}"
            ),
            SpectrumError::Operator(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SpectrumError {}

impl From<OperatorError> for SpectrumError {
    fn from(e: OperatorError) -> Self {
        SpectrumError::Operator(e)
    }
}

/// Nonincreasing singular values of one truncated operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    /// Singular values of a square column-major complex matrix.
    pub fn from_matrix(entries: &[Complex64], size: usize) -> Self {
        assert_eq!(entries.len(), size * size, "matrix shape mismatch");
        if size == 0 {
            return SingularSpectrum { values: Vec::new() };
        }

        // Normalize by the largest entry so column norms cannot overflow
        // even when symbol growth puts entries near 1e150.
        let scale = entries.iter().map(|e| e.norm()).fold(0.0f64, f64::max);
        if scale == 0.0 {
            return SingularSpectrum {
                values: vec![0.0; size],
            };
        }
        let mut work: Vec<Complex64> = entries.iter().map(|e| e / scale).collect();

        let mut values = one_sided_jacobi(&mut work, size);
        for v in &mut values {
            *v *= scale;
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        SingularSpectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `Σ σ^p`, compensated summation in the fixed nonincreasing order.
    pub fn power_sum(&self, order: SchattenOrder) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &v in &self.values {
            let term = if v == 0.0 { 0.0 } else { v.powf(order.p) };
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    /// `(Σ σ^p)^{1/p}`.
    pub fn schatten_norm(&self, order: SchattenOrder) -> f64 {
        self.power_sum(order).powf(1.0 / order.p)
    }
}

/// Singular values of a truncated operator matrix.
pub fn singular_values(op: &TruncatedOperator) -> SingularSpectrum {
    SingularSpectrum::from_matrix(op.entries(), op.size())
}

/// One-sided Jacobi SVD: unitary 2×2 rotations orthogonalize column pairs of
/// the (column-major) matrix in place; at convergence the column norms are
/// the singular values.
///
/// Chosen over an eigensolve of `T*T` because forming the Gram matrix
/// squares the condition number and destroys small singular values; the
/// one-sided sweep keeps them to near machine relative accuracy.
fn one_sided_jacobi(a: &mut [Complex64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 64;
    const ORTH_TOL: f64 = 1e-15;

    let col = |a: &[Complex64], j: usize, i: usize| a[j * n + i];
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                // 2×2 Gram block of columns p, q
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = Complex64::ZERO;
                for i in 0..n {
                    let u = col(a, p, i);
                    let v = col(a, q, i);
                    app += u.norm_sqr();
                    aqq += v.norm_sqr();
                    apq += u.conj() * v;
                }
                let beta = apq.norm();
                if beta * beta <= ORTH_TOL * ORTH_TOL * app * aqq {
                    continue;
                }
                rotated = true;
                let phi = apq.arg();
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e_neg = Complex64::from_polar(1.0, -phi);
                // col_p' = c·col_p - s e^{-iφ}·col_q,
                // col_q' = s·col_p + c e^{-iφ}·col_q
                for i in 0..n {
                    let u = a[p * n + i];
                    let v = a[q * n + i];
                    a[p * n + i] = c * u - s * e_neg * v;
                    a[q * n + i] = s * u + c * e_neg * v;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n)
        .map(|j| (0..n).map(|i| col(a, j, i).norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Verdict of a finite-size membership probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Converged,
    Diverging,
    Inconclusive,
}

impl fmt::Display for ConvergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConvergenceVerdict::Converged => "converged",
            ConvergenceVerdict::Diverging => "diverging",
            ConvergenceVerdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Heuristic thresholds for the verdict rules. These are configuration, not
/// constants: every report echoes the values in force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticThresholds {
    /// Relative plateau below which successive power sums count as Cauchy.
    pub plateau_rtol: f64,
    /// Fitted log-log growth rate above which the sums count as diverging.
    pub slope_threshold: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        DiagnosticThresholds {
            plateau_rtol: 1e-8,
            slope_threshold: 0.05,
        }
    }
}

/// Power sums and Schatten norms across a truncation schedule, with the
/// fitted growth slope and the verdict the thresholds produce.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub sizes: Vec<usize>,
    /// `Σ σ^p` at each size.
    pub power_sums: Vec<f64>,
    /// `(Σ σ^p)^{1/p}` at each size.
    pub norms: Vec<f64>,
    /// Least-squares slope of `ln Σσ^p` against `ln N` over the last three
    /// sizes (NaN when the fit is impossible).
    pub slope: f64,
    pub verdict: ConvergenceVerdict,
    pub thresholds: DiagnosticThresholds,
}

/// Builds the operator at every size in the schedule and classifies the
/// growth of the Schatten power sums.
///
/// The verdict is a deterministic function of the recorded sums:
/// - `Converged` when the sums plateau to within `plateau_rtol`, or when the
///   growth slope is below `slope_threshold` with shrinking increments
///   (slowly converging tails never plateau at desk-scale sizes);
/// - `Diverging` when the fitted slope exceeds `slope_threshold`, or the
///   sums leave the representable range;
/// - `Inconclusive` otherwise.
pub fn convergence_diagnose(
    kind: OperatorKind,
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    sizes: &[usize],
    thresholds: DiagnosticThresholds,
) -> Result<ConvergenceReport, SpectrumError> {
    if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectrumError::BadSchedule(sizes.to_vec()));
    }
    let mut power_sums = Vec::with_capacity(sizes.len());
    let mut norms = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let op = TruncatedOperator::build(kind, pair, params, n)?;
        let spectrum = singular_values(&op);
        power_sums.push(spectrum.power_sum(order));
        norms.push(spectrum.schatten_norm(order));
    }
    let (verdict, slope) = classify_power_sums(sizes, &power_sums, thresholds);
    Ok(ConvergenceReport {
        sizes: sizes.to_vec(),
        power_sums,
        norms,
        slope,
        verdict,
        thresholds,
    })
}

fn classify_power_sums(
    sizes: &[usize],
    sums: &[f64],
    thresholds: DiagnosticThresholds,
) -> (ConvergenceVerdict, f64) {
    if sums.iter().any(|s| s.is_nan()) {
        return (ConvergenceVerdict::Inconclusive, f64::NAN);
    }
    if sums.iter().all(|&s| s == 0.0) {
        return (ConvergenceVerdict::Converged, 0.0);
    }
    if sums.iter().any(|s| s.is_infinite()) {
        return (ConvergenceVerdict::Diverging, f64::INFINITY);
    }

    let k = sums.len();
    let tail_sums = &sums[k - 3..];
    let tail_sizes = &sizes[k - 3..];

    let rel = |prev: f64, next: f64| (next - prev) / next.abs().max(f64::MIN_POSITIVE);
    let d0 = rel(tail_sums[0], tail_sums[1]);
    let d1 = rel(tail_sums[1], tail_sums[2]);

    let slope = fit_loglog_slope(tail_sizes, tail_sums);

    if d0.abs() < thresholds.plateau_rtol && d1.abs() < thresholds.plateau_rtol {
        return (ConvergenceVerdict::Converged, slope);
    }
    if slope.is_nan() {
        return (ConvergenceVerdict::Inconclusive, slope);
    }
    if slope > thresholds.slope_threshold {
        return (ConvergenceVerdict::Diverging, slope);
    }
    // sub-threshold growth with shrinking increments: converging tail
    if d0 >= 0.0 && d1 >= 0.0 && d1 < d0 {
        return (ConvergenceVerdict::Converged, slope);
    }
    (ConvergenceVerdict::Inconclusive, slope)
}

fn fit_loglog_slope(sizes: &[usize], sums: &[f64]) -> f64 {
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .zip(sums.iter())
        .filter(|(_, &s)| s > 0.0)
        .map(|(&n, &s)| ((n as f64).ln(), s.ln()))
        .collect();
    if points.len() < 2 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spectrum_of(cols: &[&[Complex64]]) -> SingularSpectrum {
        let n = cols.len();
        let mut entries = Vec::with_capacity(n * n);
        for col in cols {
            assert_eq!(col.len(), n);
            entries.extend_from_slice(col);
        }
        SingularSpectrum::from_matrix(&entries, n)
    }

    #[test]
    fn diagonal_matrix() {
        let s = spectrum_of(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        assert!((s.values()[0] - 2.0).abs() < 1e-14);
        assert!((s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn antidiagonal_matrix() {
        let s = spectrum_of(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        assert!((s.values()[0] - 1.0).abs() < 1e-14);
        assert!((s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dense_complex_matrix_against_frobenius_and_product() {
        // 3×3 with nontrivial phases: σ₁²σ₂²σ₃² = |det|² and Σσ² = ||T||²_F
        let cols: Vec<Vec<Complex64>> = vec![
            vec![c(1.0, 0.5), c(0.0, -1.0), c(0.3, 0.0)],
            vec![c(0.2, 0.0), c(2.0, 1.0), c(-0.4, 0.6)],
            vec![c(0.0, 0.7), c(0.1, -0.2), c(1.5, -1.0)],
        ];
        let views: Vec<&[Complex64]> = cols.iter().map(|v| v.as_slice()).collect();
        let s = spectrum_of(&views);
        let frob: f64 = cols
            .iter()
            .flat_map(|col| col.iter())
            .map(|e| e.norm_sqr())
            .sum();
        let sum_sq: f64 = s.values().iter().map(|v| v * v).sum();
        assert!((frob - sum_sq).abs() / frob < 1e-12);

        let det = cols[0][0] * (cols[1][1] * cols[2][2] - cols[2][1] * cols[1][2])
            - cols[1][0] * (cols[0][1] * cols[2][2] - cols[2][1] * cols[0][2])
            + cols[2][0] * (cols[0][1] * cols[1][2] - cols[1][1] * cols[0][2]);
        let prod: f64 = s.values().iter().product();
        assert!((prod - det.norm()).abs() / det.norm() < 1e-10);
    }

    #[test]
    fn shift_matrix_singular_values_are_entry_moduli() {
        // single nonzero entry per column: T*T is diagonal
        let weights = [c(0.3, 0.4), c(-1.2, 0.0), c(0.0, 2.0), c(0.05, -0.02)];
        let n = 5;
        let mut entries = vec![Complex64::ZERO; n * n];
        for (k, &w) in weights.iter().enumerate() {
            entries[k * n + k + 1] = w;
        }
        let s = SingularSpectrum::from_matrix(&entries, n);
        let mut expected: Vec<f64> = weights.iter().map(|w| w.norm()).collect();
        expected.push(0.0);
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in s.values().iter().zip(expected.iter()) {
            assert!((got - want).abs() <= 1e-14 * want.max(1.0));
        }
    }

    #[test]
    fn permuting_rows_and_columns_preserves_singular_values() {
        let n = 12;
        // deterministic scrambled entries
        let entries: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let t = i as f64;
                c((t * 0.83).sin(), (t * 1.91).cos() * 0.7)
            })
            .collect();
        let base = SingularSpectrum::from_matrix(&entries, n);

        let row_perm: Vec<usize> = (0..n).map(|i| (i * 5 + 3) % n).collect();
        let col_perm: Vec<usize> = (0..n).map(|i| (i * 7 + 1) % n).collect();
        let mut permuted = vec![Complex64::ZERO; n * n];
        for col in 0..n {
            for row in 0..n {
                permuted[col_perm[col] * n + row_perm[row]] = entries[col * n + row];
            }
        }
        let shuffled = SingularSpectrum::from_matrix(&permuted, n);
        for (a, b) in base.values().iter().zip(shuffled.values().iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn huge_entries_do_not_overflow_the_gram_matrix() {
        let n = 4;
        let mut entries = vec![Complex64::ZERO; n * n];
        for k in 0..n - 1 {
            entries[k * n + k + 1] = c(1e160, 0.0);
        }
        let s = SingularSpectrum::from_matrix(&entries, n);
        assert!((s.largest() - 1e160).abs() / 1e160 < 1e-14);
    }

    #[test]
    fn volterra_z_singular_values_are_exact() {
        for &alpha in &[1.0, 2.0] {
            let params = crate::fock::FockParams::new(alpha);
            let pair = SymbolPair::without_psi(Poly::identity());
            let n = 64;
            let op = TruncatedOperator::build(OperatorKind::Vg, &pair, params, n).unwrap();
            let s = singular_values(&op);
            let mut expected: Vec<f64> = (0..n - 1)
                .map(|k| 1.0 / (alpha * (k as f64 + 1.0)).sqrt())
                .collect();
            expected.push(0.0);
            expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (got, want) in s.values().iter().zip(expected.iter()) {
                assert!(
                    (got - want).abs() <= 1e-10 * want.max(1e-10),
                    "alpha={alpha}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn companion_z_largest_singular_value_grows_like_sqrt_n() {
        let params = crate::fock::FockParams::new(1.0);
        let pair = SymbolPair::without_psi(Poly::identity());
        for &n in &[64usize, 128, 256] {
            let op = TruncatedOperator::build(OperatorKind::Ig, &pair, params, n).unwrap();
            let s = singular_values(&op);
            let ratio = s.largest() / ((n as f64 - 1.0).sqrt());
            assert!((0.9..=1.1).contains(&ratio), "N={n}: ratio {ratio}");
        }
    }

    #[test]
    fn schatten_norm_examples() {
        let s = SingularSpectrum {
            values: vec![4.0, 3.0],
        };
        let p2 = SchattenOrder::new(2.0).unwrap();
        let p1 = SchattenOrder::new(1.0).unwrap();
        let ph = SchattenOrder::new(0.5).unwrap();
        assert!((s.schatten_norm(p2) - 5.0).abs() < 1e-14);
        assert!((s.schatten_norm(p1) - 7.0).abs() < 1e-14);
        assert!((s.schatten_norm(ph) - (7.0 + 4.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!(ph.is_quasi_norm());
        assert!(!p1.is_quasi_norm());
    }

    #[test]
    fn invalid_orders_rejected() {
        assert!(SchattenOrder::new(0.0).is_err());
        assert!(SchattenOrder::new(-2.0).is_err());
        assert!(SchattenOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn volterra_p4_power_sums_track_truncated_zeta() {
        let params = crate::fock::FockParams::new(1.0);
        let pair = SymbolPair::without_psi(Poly::identity());
        let order = SchattenOrder::new(4.0).unwrap();
        let report = convergence_diagnose(
            OperatorKind::Vg,
            &pair,
            params,
            order,
            &[64, 128, 256],
            DiagnosticThresholds::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, ConvergenceVerdict::Converged);
        for (i, &n) in report.sizes.iter().enumerate() {
            let zeta_trunc: f64 = (1..n).map(|m| 1.0 / (m * m) as f64).sum();
            assert!(
                (report.power_sums[i] - zeta_trunc).abs() < 1e-10,
                "N={n}: {} vs {zeta_trunc}",
                report.power_sums[i]
            );
        }
    }

    #[test]
    fn companion_z_is_diverging() {
        let params = crate::fock::FockParams::new(1.0);
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
        assert!(report.slope > 0.05);
    }

    #[test]
    fn zero_symbol_converges_at_zero() {
        let params = crate::fock::FockParams::new(1.0);
        let pair = SymbolPair::with_psi(Poly::zero(), Poly::identity());
        let order = SchattenOrder::new(2.0).unwrap();
        let report = convergence_diagnose(
            OperatorKind::IgPsi,
            &pair,
            params,
            order,
            &[8, 16, 32],
            DiagnosticThresholds::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, ConvergenceVerdict::Converged);
        assert!(report.power_sums.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn schedule_validation() {
        let params = crate::fock::FockParams::new(1.0);
        let pair = SymbolPair::without_psi(Poly::identity());
        let order = SchattenOrder::new(2.0).unwrap();
        for bad in [vec![16usize, 32], vec![32, 16, 64], vec![16, 16, 32]] {
            assert!(matches!(
                convergence_diagnose(
                    OperatorKind::Vg,
                    &pair,
                    params,
                    order,
                    &bad,
                    DiagnosticThresholds::default()
                ),
                Err(SpectrumError::BadSchedule(_))
            ));
        }
    }

    #[test]
    fn thresholds_are_echoed_in_reports() {
        let params = crate::fock::FockParams::new(1.0);
        let pair = SymbolPair::without_psi(Poly::identity());
        let order = SchattenOrder::new(2.0).unwrap();
        let custom = DiagnosticThresholds {
            plateau_rtol: 1e-6,
            slope_threshold: 0.2,
        };
        let report = convergence_diagnose(
            OperatorKind::Vg,
            &pair,
            params,
            order,
            &[8, 16, 32],
            custom,
        )
        .unwrap();
        assert_eq!(report.thresholds, custom);
    }
}
