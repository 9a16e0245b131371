//! Membership decision machinery: Berezin-type transforms, their L^{p/2}
//! integrals, the weighted L^p criterion integrals, the exact symbolic
//! classifier for polynomial symbols, and the companion-family comparison.
//!
//! Symbolic exponent analysis runs before any quadrature: on the polynomial
//! and affine symbol class, finiteness of the criterion integral is exactly
//! decidable, and the numeric divergence prober is kept as a cross-check
//! only.

use std::fmt;

use num_complex::Complex64;

use crate::fock::FockParams;
use crate::operator::{
    apply_operator, OperatorError, OperatorKind, SymbolPair,
};
use crate::poly::{AffineMap, Poly};
use crate::quadrature::{
    probe_divergence, IntegralResult, ProbeSettings, QuadratureError, QuadratureGrid,
};
use crate::spectrum::{
    convergence_diagnose, ConvergenceReport, ConvergenceVerdict, DiagnosticThresholds,
    SchattenOrder, SpectrumError,
};

/// Empirical band for ratio diagnostics of two-sided estimates whose
/// constants the theory leaves unspecified. Recorded configuration, not a
/// theory-side bound.
pub const DEFAULT_RATIO_BAND: (f64, f64) = (1e-3, 1e3);

/// Which Berezin-type transform: the one controlling the generalized
/// companion operator, or the one (with the extra `ψ'` factor) controlling
/// its composition variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformWhich {
    ForI,
    ForC,
}

impl TransformWhich {
    /// The symbol whose modulus enters the transform: `g` itself for the
    /// companion family, `(g∘ψ)·ψ'` for the composition family.
    fn effective_symbol(&self, pair: &SymbolPair) -> Result<Poly, CriteriaError> {
        let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
        Ok(match self {
            TransformWhich::ForI => pair.g.clone(),
            TransformWhich::ForC => &pair.g.compose(psi) * &psi.derivative(),
        })
    }

    /// The symbol entering the weighted criterion integrand:
    /// `g` for the companion family, `g∘ψ` for the composition family.
    fn criterion_symbol(&self, pair: &SymbolPair) -> Result<Poly, CriteriaError> {
        let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
        Ok(match self {
            TransformWhich::ForI => pair.g.clone(),
            TransformWhich::ForC => pair.g.compose(psi),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CriteriaError {
    /// Every criterion needs the pair's second symbol.
    MissingPsi,
    /// The Berezin transform is only evaluated for affine `ψ`; for higher
    /// degree the inner integral has no Gaussian envelope to quadrate.
    NonAffineTransform,
    Operator(OperatorError),
    Spectrum(SpectrumError),
    Quadrature(QuadratureError),
}

impl fmt::Display for CriteriaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriteriaError::MissingPsi => write!(f, "criterion requires the symbol psi"),
            CriteriaError::NonAffineTransform => {
                write!(f, "Berezin transform evaluation requires affine psi")
            }
            CriteriaError::Operator(e) => write!(f, "{e}"),
            CriteriaError::Spectrum(e) => write!(f, "{e}"),
            CriteriaError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CriteriaError {}

impl From<OperatorError> for CriteriaError {
    fn from(e: OperatorError) -> Self {
        CriteriaError::Operator(e)
    }
}

impl From<SpectrumError> for CriteriaError {
    fn from(e: SpectrumError) -> Self {
        CriteriaError::Spectrum(e)
    }
}

impl From<QuadratureError> for CriteriaError {
    fn from(e: QuadratureError) -> Self {
        CriteriaError::Quadrature(e)
    }
}

/// Structured grounds for a membership verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipReason {
    /// `g ≡ 0`: the zero operator belongs to every class.
    ZeroSymbol,
    /// `ψ = az + b` with `|a| < 1`: the criterion weight decays.
    AffineContractive,
    /// `ψ` affine with `|a| >= 1`: the weight fails to decay.
    AffineNonContractive,
    /// `deg ψ >= 2`: the exponent grows along some direction.
    NonAffinePsi,
}

impl MembershipReason {
    pub fn is_member(&self) -> bool {
        matches!(
            self,
            MembershipReason::ZeroSymbol | MembershipReason::AffineContractive
        )
    }
}

/// Membership status plus the structural reason that decides it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    member: bool,
    reason: MembershipReason,
}

impl MembershipVerdict {
    fn from_reason(reason: MembershipReason) -> Self {
        MembershipVerdict {
            member: reason.is_member(),
            reason,
        }
    }

    pub fn is_member(&self) -> bool {
        self.member
    }

    pub fn reason(&self) -> MembershipReason {
        self.reason
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.member { "member" } else { "not-member" };
        let reason = match self.reason {
            MembershipReason::ZeroSymbol => "zero-symbol",
            MembershipReason::AffineContractive => "affine-contractive",
            MembershipReason::AffineNonContractive => "affine-non-contractive",
            MembershipReason::NonAffinePsi => "non-affine-psi",
        };
        write!(f, "{status}/{reason}")
    }
}

/// Exact membership decision for polynomial symbols: member iff `g ≡ 0`, or
/// `ψ` is affine with `|a| < 1`. The dichotomy is independent of the
/// Schatten order on this symbol class.
pub fn classify_symbolic(pair: &SymbolPair) -> Result<MembershipVerdict, CriteriaError> {
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
    if pair.g.is_zero() {
        return Ok(MembershipVerdict::from_reason(MembershipReason::ZeroSymbol));
    }
    match AffineMap::from_poly(psi) {
        None => Ok(MembershipVerdict::from_reason(MembershipReason::NonAffinePsi)),
        Some(map) if map.a.norm() < 1.0 => Ok(MembershipVerdict::from_reason(
            MembershipReason::AffineContractive,
        )),
        Some(_) => Ok(MembershipVerdict::from_reason(
            MembershipReason::AffineNonContractive,
        )),
    }
}

/// Log-scale envelope of the transform integrand's w-dependent prefactor;
/// below this the transform is treated as zero without quadrature.
const NEGLIGIBLE_LOG: f64 = -600.0;

/// Berezin-type transform at one point `w`:
///
/// `B(w) = (1+|w|)² ∫ |k_w(ψ(z))|² |q(z)|² e^{-α|z|²} (1+|z|)^{-2} dm(z)`,
///
/// where `q = g` for the companion family and `q = (g∘ψ)·ψ'` for the
/// composition family. Affine `ψ = az + b` recenters the Gaussian mass at
/// `ā w`, which fixes the quadrature grid.
pub fn berezin_transform(
    which: TransformWhich,
    pair: &SymbolPair,
    params: FockParams,
    w: Complex64,
    tol: f64,
) -> Result<f64, CriteriaError> {
    let q = which.effective_symbol(pair)?;
    if q.is_zero() {
        return Ok(0.0);
    }
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
    let map = AffineMap::from_poly(psi).ok_or(CriteriaError::NonAffineTransform)?;

    let alpha = params.alpha();
    let amod = map.a.norm();
    let deg_q = q.degree().unwrap_or(0);

    // prefactor envelope: 2 ln(1+|w|) + α(|a|²-1)|w|² + 2α|b||w| bounds the
    // log of B(w) up to the z-integral's polynomial factor
    let envelope = 2.0 * (1.0 + w.norm()).ln() + alpha * (amod * amod - 1.0) * w.norm_sqr()
        + 2.0 * alpha * map.b.norm() * w.norm();
    if envelope < NEGLIGIBLE_LOG {
        return Ok(0.0);
    }

    let center = map.a.conj() * w;
    let rate = 2.0 * alpha * amod * w.norm();
    let grid = QuadratureGrid::shifted_gaussian(alpha, center.norm(), tol, 2 * deg_q + 2, rate)?;

    let scale = (1.0 + w.norm()).powi(2);
    let result = grid.integrate(|z| {
        let qz = q.eval(z).norm_sqr();
        if qz == 0.0 {
            return 0.0;
        }
        let log_weight = params.normalized_kernel_sq_log(w, map.eval(z))
            - alpha * z.norm_sqr();
        let denom = (1.0 + z.norm()).powi(2);
        qz / denom * log_weight.exp()
    })?;
    Ok(scale * result.value().expect("plain quadrature is finite"))
}

/// Outcome of the L^{p/2} Berezin integral, with the `value^{1/p}` norm
/// estimate reported alongside for asymptotic-norm comparisons.
#[derive(Clone, Debug)]
pub struct BerezinLpOutcome {
    pub result: IntegralResult,
    /// `(∫ B^{p/2})^{1/p}` when finite.
    pub norm_estimate: Option<f64>,
}

/// `∫ B^{p/2}(w) dm(w)` with the outer integral handled by the annulus
/// prober. The symbol shapes that make `B(w)` infinite on a neighborhood of
/// infinity (`|a| > 1` or `deg ψ >= 2`, with nonzero symbol) short-circuit
/// to a divergence verdict.
pub fn berezin_lp_integral(
    which: TransformWhich,
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    outer: &ProbeSettings,
    inner_tol: f64,
) -> Result<BerezinLpOutcome, CriteriaError> {
    let q = which.effective_symbol(pair)?;
    if q.is_zero() {
        return Ok(BerezinLpOutcome {
            result: IntegralResult::Finite {
                value: 0.0,
                error_estimate: 0.0,
                annulus_trace: Vec::new(),
            },
            norm_estimate: Some(0.0),
        });
    }
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
    match AffineMap::from_poly(psi) {
        Some(map) if map.a.norm() <= 1.0 => {}
        // the inner transform is +∞ outside a bounded set of w
        _ => {
            return Ok(BerezinLpOutcome {
                result: IntegralResult::Divergent {
                    annulus_trace: Vec::new(),
                },
                norm_estimate: None,
            })
        }
    }

    let half_p = 0.5 * order.p();
    let result = probe_divergence(
        |w| match berezin_transform(which, pair, params, w, inner_tol) {
            Ok(b) => {
                if b == 0.0 {
                    0.0
                } else {
                    b.powf(half_p)
                }
            }
            Err(_) => f64::NAN,
        },
        outer,
    )?;
    let norm_estimate = result.value().map(|v| v.powf(1.0 / order.p()));
    Ok(BerezinLpOutcome {
        result,
        norm_estimate,
    })
}

/// The weighted L^p criterion integral
/// `∫ |h(z)|^p e^{(pα/2)(|ψ(z)|² - |z|²)} dm(z)`, `h = g` or `g∘ψ`.
///
/// Symbolic exponent analysis decides finiteness first; quadrature runs only
/// on the convergent branch, with decay rate `(pα/2)(1 - |a|²)` and mass
/// centered at `āb/(1-|a|²)`.
pub fn criterion_integral(
    which: TransformWhich,
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    tol: f64,
) -> Result<IntegralResult, CriteriaError> {
    let h = which.criterion_symbol(pair)?;
    if h.is_zero() {
        return Ok(IntegralResult::Finite {
            value: 0.0,
            error_estimate: 0.0,
            annulus_trace: Vec::new(),
        });
    }
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
    let map = match AffineMap::from_poly(psi) {
        None => {
            return Ok(IntegralResult::Divergent {
                annulus_trace: Vec::new(),
            })
        }
        Some(map) => map,
    };
    let amod = map.a.norm();
    if amod >= 1.0 {
        return Ok(IntegralResult::Divergent {
            annulus_trace: Vec::new(),
        });
    }

    let p = order.p();
    let alpha = params.alpha();
    let beta = 0.5 * p * alpha * (1.0 - amod * amod);
    let contraction = 1.0 - amod * amod;
    let center = (map.a.conj() * map.b).norm() / contraction;
    let rate = p * alpha * amod * map.b.norm();
    let deg_h = h.degree().unwrap_or(0) as f64;
    let hint = (p * deg_h).ceil() as usize + 2;
    let grid = QuadratureGrid::shifted_gaussian(beta, center, tol, hint, rate)?;

    let result = grid.integrate(|z| {
        let hz = h.eval(z).norm();
        if hz == 0.0 {
            return 0.0;
        }
        let exponent = 0.5 * p * alpha * (map.eval(z).norm_sqr() - z.norm_sqr());
        (p * hz.ln() + exponent).exp()
    })?;
    Ok(result)
}

/// Pure-numeric fallback for the criterion integral: the annulus prober on
/// the raw integrand, no symbolic analysis. Cross-checks the classifier.
pub fn criterion_integral_probe(
    which: TransformWhich,
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    settings: &ProbeSettings,
) -> Result<IntegralResult, CriteriaError> {
    let h = which.criterion_symbol(pair)?;
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?.clone();
    let p = order.p();
    let alpha = params.alpha();
    let result = probe_divergence(
        |z| {
            let hz = h.eval(z).norm();
            if hz == 0.0 {
                return 0.0;
            }
            let exponent = 0.5 * p * alpha * (psi.eval(z).norm_sqr() - z.norm_sqr());
            (p * hz.ln() + exponent).exp()
        },
        settings,
    )?;
    Ok(result)
}

/// Convergence reports for both operators of each companion family, with
/// the one-directional implication the corollary asserts.
#[derive(Clone, Debug)]
pub struct CompanionComparison {
    /// `I`-branch: the generalized companion operator.
    pub companion: ConvergenceReport,
    /// `V`-branch: the generalized Volterra operator sharing the pair.
    pub volterra: ConvergenceReport,
    /// Composition variants of the same two families.
    pub companion_composed: ConvergenceReport,
    pub volterra_composed: ConvergenceReport,
    /// companion converged ⇒ volterra converged (the asserted direction).
    pub companion_implies_volterra: bool,
    pub composed_implication: bool,
}

/// Runs the finite-size membership probe for `I`- and `V`-family operators
/// on the same symbol pair and checks the asserted implication: whenever the
/// companion branch converges, the Volterra branch must too. The converse is
/// not asserted (and genuinely fails).
pub fn companion_comparison(
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    sizes: &[usize],
    thresholds: DiagnosticThresholds,
) -> Result<CompanionComparison, CriteriaError> {
    let companion =
        convergence_diagnose(OperatorKind::IgPsi, pair, params, order, sizes, thresholds)?;
    let volterra = convergence_diagnose(
        OperatorKind::VgUpperPsi,
        pair,
        params,
        order,
        sizes,
        thresholds,
    )?;
    let companion_composed =
        convergence_diagnose(OperatorKind::CgPsi, pair, params, order, sizes, thresholds)?;
    let volterra_composed = convergence_diagnose(
        OperatorKind::CgUpperPsi,
        pair,
        params,
        order,
        sizes,
        thresholds,
    )?;

    let implies = |i: &ConvergenceReport, v: &ConvergenceReport| {
        i.verdict != ConvergenceVerdict::Converged || v.verdict == ConvergenceVerdict::Converged
    };
    let companion_implies_volterra = implies(&companion, &volterra);
    let composed_implication = implies(&companion_composed, &volterra_composed);
    Ok(CompanionComparison {
        companion,
        volterra,
        companion_composed,
        volterra_composed,
        companion_implies_volterra,
        composed_implication,
    })
}

/// Ratio diagnostic for the two-sided comparison between the quadratic and
/// p-th kernel moments of the symbol,
///
/// `T_q(w) = ∫ |k_w(ψ(ζ))|^q |g(ζ)|^q e^{-qα|ζ|²/2} (1+|ζ|)^{-q} dm(ζ)`:
///
/// for `p <= 2` the estimate bounds `T_2` by `T_p^{2/p}`, for `p > 2` it
/// bounds `T_p` by `T_2^{p/2}`; the returned value is LHS/RHS for the
/// applicable direction. Constants are unspecified, so callers check a
/// recorded band rather than a theory-side inequality.
pub fn moment_comparison_ratio(
    pair: &SymbolPair,
    params: FockParams,
    order: SchattenOrder,
    w: Complex64,
    tol: f64,
) -> Result<f64, CriteriaError> {
    let q2 = kernel_moment(pair, params, 2.0, w, tol)?;
    let p = order.p();
    if (p - 2.0).abs() < 1e-12 {
        return Ok(1.0);
    }
    let qp = kernel_moment(pair, params, p, w, tol)?;
    if p < 2.0 {
        Ok(q2 / qp.powf(2.0 / p))
    } else {
        Ok(qp / q2.powf(p / 2.0))
    }
}

/// `∫ |k_w(ψ(ζ))|^q |g(ζ)|^q e^{-qα|ζ|²/2} (1+|ζ|)^{-q} dm(ζ)` for affine ψ.
fn kernel_moment(
    pair: &SymbolPair,
    params: FockParams,
    q: f64,
    w: Complex64,
    tol: f64,
) -> Result<f64, CriteriaError> {
    let g = pair.g.clone();
    if g.is_zero() {
        return Ok(0.0);
    }
    let psi = pair.psi.as_ref().ok_or(CriteriaError::MissingPsi)?;
    let map = AffineMap::from_poly(psi).ok_or(CriteriaError::NonAffineTransform)?;
    let alpha = params.alpha();
    let center = map.a.conj() * w;
    let rate = q * alpha * map.a.norm() * w.norm();
    let hint = (q * g.degree().unwrap_or(0) as f64).ceil() as usize + 2;
    let grid =
        QuadratureGrid::shifted_gaussian(0.5 * q * alpha, center.norm(), tol, hint, rate)?;
    let result = grid.integrate(|z| {
        let gz = g.eval(z).norm();
        if gz == 0.0 {
            return 0.0;
        }
        let log_kernel = 0.5 * q * params.normalized_kernel_sq_log(w, map.eval(z));
        (q * gz.ln() + log_kernel - 0.5 * q * alpha * z.norm_sqr() - q * (1.0 + z.norm()).ln())
            .exp()
    })?;
    Ok(result.value().expect("plain quadrature is finite"))
}

/// Ratio diagnostic for the norm-domination estimate
/// `||I_{(g,ψ)} f||² <= C ∫ |f'(w)|² e^{-α|w|²} (1+|w|)^{-2} B(w) dm(w)`:
/// returns LHS/RHS for one test function. The constant `C` is not specified
/// by the theory, so callers check the ratio against a recorded band.
pub fn domination_ratio(
    pair: &SymbolPair,
    params: FockParams,
    f: &Poly,
    inner_tol: f64,
) -> Result<f64, CriteriaError> {
    let image = apply_operator(OperatorKind::IgPsi, pair, f)?;
    let lhs = params.norm_sq(&image);

    let alpha = params.alpha();
    let f_prime = f.derivative();
    let deg = f_prime.degree().unwrap_or(0);
    let outer = QuadratureGrid::gaussian(alpha, 1e-8, 2 * deg + 2)?;
    let rhs = outer
        .integrate(|w| {
            let fp = f_prime.eval(w).norm_sqr();
            if fp == 0.0 {
                return 0.0;
            }
            let b = berezin_transform(TransformWhich::ForI, pair, params, w, inner_tol)
                .unwrap_or(f64::NAN);
            fp * (-alpha * w.norm_sqr()).exp() / (1.0 + w.norm()).powi(2) * b
        })?
        .value()
        .expect("plain quadrature is finite");
    Ok(lhs / rhs)
}
