//! The seven integral operators and their truncated matrix representations.
//!
//! For polynomial symbols every operator maps polynomials to polynomials, so
//! columns of the basis matrix `⟨T e_n, e_m⟩` come out exactly: apply the
//! operator to the monomial `z^n`, then rescale each coefficient by the
//! basis-change factor `||z^m||/||z^n||` in log space. A quadrature path
//! computes the same entries as planar integrals and serves as an
//! independent cross-check.

use std::fmt;

use num_complex::Complex64;

use crate::fock::FockParams;
use crate::poly::Poly;
use crate::quadrature::{QuadratureError, QuadratureGrid};

/// Relative coefficient mass lost past the truncation degree above which a
/// column is flagged; silent tail corruption would poison Schatten sums.
pub const LEAKAGE_FLAG_THRESHOLD: f64 = 1e-6;

/// The operator family, by how the symbols `g` and `ψ` enter the integral.
///
/// - `Vg`:         `f ↦ ∫₀^z f g'`
/// - `Ig`:         `f ↦ ∫₀^z f' g`
/// - `Mg`:         `f ↦ g·f`
/// - `IgPsi`:      `f ↦ ∫₀^z (f'∘ψ) g`
/// - `CgPsi`:      `f ↦ ∫₀^{ψ(z)} f' g`
/// - `VgUpperPsi`: `f ↦ ∫₀^z (f∘ψ) g'`
/// - `CgUpperPsi`: `f ↦ ∫₀^{ψ(z)} f g'`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Vg,
    Ig,
    Mg,
    IgPsi,
    CgPsi,
    VgUpperPsi,
    CgUpperPsi,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::Vg,
        OperatorKind::Ig,
        OperatorKind::Mg,
        OperatorKind::IgPsi,
        OperatorKind::CgPsi,
        OperatorKind::VgUpperPsi,
        OperatorKind::CgUpperPsi,
    ];

    /// Kinds acting through a second symbol; `Vg`, `Ig`, `Mg` ignore `ψ`.
    pub fn requires_psi(&self) -> bool {
        matches!(
            self,
            OperatorKind::IgPsi
                | OperatorKind::CgPsi
                | OperatorKind::VgUpperPsi
                | OperatorKind::CgUpperPsi
        )
    }

    /// CLI / config token.
    pub fn token(&self) -> &'static str {
        match self {
            OperatorKind::Vg => "vg",
            OperatorKind::Ig => "ig",
            OperatorKind::Mg => "mg",
            OperatorKind::IgPsi => "igpsi",
            OperatorKind::CgPsi => "cgpsi",
            OperatorKind::VgUpperPsi => "vgup",
            OperatorKind::CgUpperPsi => "cgup",
        }
    }

    pub fn parse_token(s: &str) -> Option<OperatorKind> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.token() == s.to_ascii_lowercase())
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The symbols `(g, ψ)` inducing an operator. `ψ` of degree >= 2 is admitted
/// by the builders — exhibiting divergence needs it — even though no such
/// operator is ever compact; enforcing that is the classifier's job.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPair {
    pub g: Poly,
    pub psi: Option<Poly>,
}

impl SymbolPair {
    pub fn new(g: Poly, psi: Option<Poly>) -> Self {
        SymbolPair { g, psi }
    }

    pub fn without_psi(g: Poly) -> Self {
        SymbolPair { g, psi: None }
    }

    pub fn with_psi(g: Poly, psi: Poly) -> Self {
        SymbolPair { g, psi: Some(psi) }
    }

    fn require_psi(&self, kind: OperatorKind) -> Result<&Poly, OperatorError> {
        self.psi.as_ref().ok_or(OperatorError::MissingPsi(kind))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorError {
    /// The kind integrates against `ψ` but the pair has none.
    MissingPsi(OperatorKind),
    /// Matrix truncation below the minimum size of 2.
    TruncationTooSmall(usize),
    /// The quadrature grid cannot certify the requested entry tolerance.
    GridTooCoarse { tail_bound: f64, requested: f64 },
    Quadrature(QuadratureError),
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorError::MissingPsi(kind) => {
                write!(f, "operator kind `{kind}` requires the symbol psi")
            }
            OperatorError::TruncationTooSmall(n) => {
                write!(f, "matrix truncation must be at least 2, got {n}")
            }
            OperatorError::GridTooCoarse {
                tail_bound,
                requested,
            } => write!(
                f,
                "grid tail bound {tail_bound:.3e} exceeds requested tolerance {requested:.3e}"
            ),
            OperatorError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OperatorError {}

impl From<QuadratureError> for OperatorError {
    fn from(e: QuadratureError) -> Self {
        OperatorError::Quadrature(e)
    }
}

/// Applies an operator to a polynomial, exactly.
///
/// Every integral kind produces a result vanishing at the origin; only the
/// multiplication operator can move the constant term.
pub fn apply_operator(
    kind: OperatorKind,
    pair: &SymbolPair,
    f: &Poly,
) -> Result<Poly, OperatorError> {
    let g = &pair.g;
    Ok(match kind {
        OperatorKind::Vg => (f * &g.derivative()).antiderivative0(),
        OperatorKind::Ig => (&f.derivative() * g).antiderivative0(),
        OperatorKind::Mg => f * g,
        OperatorKind::IgPsi => {
            let psi = pair.require_psi(kind)?;
            (&f.derivative().compose(psi) * g).antiderivative0()
        }
        OperatorKind::CgPsi => {
            let psi = pair.require_psi(kind)?;
            (&f.derivative() * g).antiderivative0().compose(psi)
        }
        OperatorKind::VgUpperPsi => {
            let psi = pair.require_psi(kind)?;
            (&f.compose(psi) * &g.derivative()).antiderivative0()
        }
        OperatorKind::CgUpperPsi => {
            let psi = pair.require_psi(kind)?;
            (f * &g.derivative()).antiderivative0().compose(psi)
        }
    })
}

/// An N×N matrix `⟨T e_n, e_m⟩` for one operator and symbol pair, with the
/// truncation leakage of every column on record.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    kind: OperatorKind,
    pair: SymbolPair,
    params: FockParams,
    size: usize,
    /// Column-major entries.
    entries: Vec<Complex64>,
    /// Per-column relative coefficient mass dropped at degrees >= N.
    column_leakage: Vec<f64>,
}

impl TruncatedOperator {
    /// Exact construction: column n is the basis expansion of `T e_n`.
    ///
    /// Internally the operator is applied to the monomial `z^n` and each
    /// resulting coefficient is scaled by `||z^m||/||z^n||`, so no factorial
    /// or norm is ever formed outside log space.
    pub fn build(
        kind: OperatorKind,
        pair: &SymbolPair,
        params: FockParams,
        size: usize,
    ) -> Result<Self, OperatorError> {
        if size < 2 {
            return Err(OperatorError::TruncationTooSmall(size));
        }
        if kind.requires_psi() && pair.psi.is_none() {
            return Err(OperatorError::MissingPsi(kind));
        }
        let mut entries = vec![Complex64::ZERO; size * size];
        let mut column_leakage = Vec::with_capacity(size);
        for n in 0..size {
            let image = apply_operator(kind, pair, &Poly::monomial(Complex64::new(1.0, 0.0), n))?;
            let mut kept_sq = 0.0;
            let mut dropped_sq = 0.0;
            for (m, &coeff) in image.coeffs().iter().enumerate() {
                if coeff == Complex64::ZERO {
                    continue;
                }
                let entry = coeff * params.monomial_norm_ratio(m, n);
                if m < size {
                    entries[n * size + m] = entry;
                    kept_sq += entry.norm_sqr();
                } else {
                    dropped_sq += entry.norm_sqr();
                }
            }
            let total = kept_sq + dropped_sq;
            column_leakage.push(if total > 0.0 {
                (dropped_sq / total).sqrt()
            } else {
                0.0
            });
        }
        Ok(TruncatedOperator {
            kind,
            pair: pair.clone(),
            params,
            size,
            entries,
            column_leakage,
        })
    }

    /// Independent numerical path: each entry as the planar integral
    /// `(α/π) ∫ (T e_n)(z) conj(e_m(z)) e^{-α|z|²} dm(z)`.
    ///
    /// Fails up front when the grid's recorded tail bound cannot certify the
    /// requested per-entry tolerance.
    pub fn build_by_quadrature(
        kind: OperatorKind,
        pair: &SymbolPair,
        params: FockParams,
        size: usize,
        grid: &QuadratureGrid,
        tol: f64,
    ) -> Result<Self, OperatorError> {
        if size < 2 {
            return Err(OperatorError::TruncationTooSmall(size));
        }
        if kind.requires_psi() && pair.psi.is_none() {
            return Err(OperatorError::MissingPsi(kind));
        }
        if grid.tail_bound() > tol {
            return Err(OperatorError::GridTooCoarse {
                tail_bound: grid.tail_bound(),
                requested: tol,
            });
        }
        let alpha = params.alpha();
        let mut entries = vec![Complex64::ZERO; size * size];
        for n in 0..size {
            let image = apply_operator(kind, pair, &Poly::monomial(Complex64::new(1.0, 0.0), n))?;
            if image.is_zero() {
                continue;
            }
            // ⟨z^k, e_m⟩ pairing is diagonal, so T e_n has no component past
            // its own degree; integrating those rows would only add noise.
            let max_m = image.degree().unwrap_or(0).min(size - 1);
            let scale = 1.0 / params.monomial_norm(n);
            for m in 0..=max_m {
                let value = grid.integrate_complex(|z| {
                    image.eval(z)
                        * params.basis_eval(m, z).conj()
                        * (-alpha * z.norm_sqr()).exp()
                })?;
                entries[n * size + m] = value * scale * (alpha / std::f64::consts::PI);
            }
        }
        Ok(TruncatedOperator {
            kind,
            pair: pair.clone(),
            params,
            size,
            entries,
            column_leakage: vec![0.0; size],
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn pair(&self) -> &SymbolPair {
        &self.pair
    }

    pub fn params(&self) -> FockParams {
        self.params
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `⟨T e_n, e_m⟩` (row m, column n).
    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[n * self.size + m]
    }

    /// Column-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column_leakage(&self) -> &[f64] {
        &self.column_leakage
    }

    /// Columns whose relative truncation leakage exceeds the flag threshold.
    pub fn flagged_columns(&self) -> Vec<usize> {
        self.column_leakage
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > LEAKAGE_FLAG_THRESHOLD)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Largest entry-wise deviation from another matrix of the same size.
    pub fn max_abs_difference(&self, other: &TruncatedOperator) -> f64 {
        assert_eq!(self.size, other.size, "matrix sizes differ");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Exact singular value contributed by column n of the generalized companion
/// operator with monomial symbol `g = c·z^k` and scaling `ψ = a·z`:
///
/// `σ_n = |c| · n · |a|^{n-1} / (n+k) · sqrt((n+k)!/(n! α^k))`, with `σ_0 = 0`.
///
/// Such operators shift basis element n to basis element n+k, one nonzero
/// entry per column, so the columns are orthogonal and the entry moduli are
/// the singular values themselves.
pub fn shift_weight(k: usize, c: Complex64, a: Complex64, params: FockParams, n: usize) -> f64 {
    if n == 0 || c == Complex64::ZERO {
        return 0.0;
    }
    // sqrt((n+k)!/(n! α^k)) is the monomial norm ratio ||z^{n+k}||/||z^n||
    let norm_ratio = params.monomial_norm_ratio(n + k, n);
    // |a|^{n-1} in log space; a = 0 contributes only at n = 1 (0^0 = 1)
    let amod = a.norm();
    let a_pow = if amod == 0.0 {
        if n == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        ((n as f64 - 1.0) * amod.ln()).exp()
    };
    c.norm() * n as f64 * a_pow / (n + k) as f64 * norm_ratio
}
