//! The Gaussian-weighted Hilbert space of entire functions: orthonormal
//! monomial basis, reproducing kernels, and exact inner products of
//! polynomials.
//!
//! Norms follow the convention `||f||² = (α/π) ∫ |f|² e^{-α|z|²} dm`, under
//! which the monomials satisfy `||z^n||² = n!/α^n` and the normalized basis
//! is `e_n(z) = sqrt(α^n/n!) z^n`.

use std::fmt;

use num_complex::Complex64;

use crate::poly::Poly;
use crate::special::ln_factorial;

/// The weight parameter `α > 0` that fixes the space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockParams {
    alpha: f64,
}

impl FockParams {
    pub fn new(alpha: f64) -> Self {
        assert!(
            alpha.is_finite() && alpha > 0.0,
            "weight parameter must be positive, got {alpha}"
        );
        FockParams { alpha }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `||z^n|| = sqrt(n!/α^n)`, evaluated in log space.
    pub fn monomial_norm(&self, n: usize) -> f64 {
        (0.5 * (ln_factorial(n as u64) - n as f64 * self.alpha.ln())).exp()
    }

    /// `||z^m|| / ||z^n||` without forming either norm, so the ratio stays
    /// finite at indices where the norms themselves overflow.
    pub fn monomial_norm_ratio(&self, m: usize, n: usize) -> f64 {
        let ln_ratio = 0.5
            * (ln_factorial(m as u64) - ln_factorial(n as u64)
                - (m as f64 - n as f64) * self.alpha.ln());
        ln_ratio.exp()
    }

    /// The n-th orthonormal basis element `e_n(z) = sqrt(α^n/n!) z^n`,
    /// evaluated through logarithms so neither `α^n/n!` nor `z^n` overflows.
    pub fn basis_eval(&self, n: usize, z: Complex64) -> Complex64 {
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let r = z.norm();
        if r == 0.0 {
            return Complex64::ZERO;
        }
        let ln_mag = 0.5 * (n as f64 * self.alpha.ln() - ln_factorial(n as u64))
            + n as f64 * r.ln();
        Complex64::from_polar(ln_mag.exp(), n as f64 * z.arg())
    }

    /// Reproducing kernel `K_w(z) = e^{α z w̄}`.
    pub fn kernel(&self, w: Complex64, z: Complex64) -> Complex64 {
        (self.alpha * z * w.conj()).exp()
    }

    /// Unit-norm kernel `k_w(z) = e^{α z w̄ - α|w|²/2}`.
    pub fn normalized_kernel(&self, w: Complex64, z: Complex64) -> Complex64 {
        (self.alpha * z * w.conj() - 0.5 * self.alpha * w.norm_sqr()).exp()
    }

    /// `|k_w(u)|²` on a log scale: `2α Re(u w̄) - α|w|²`.
    ///
    /// The Berezin transforms integrate this against other exponentials, so
    /// exposing the exponent (rather than the value) lets callers combine
    /// log-weights before a single `exp`.
    pub fn normalized_kernel_sq_log(&self, w: Complex64, u: Complex64) -> f64 {
        2.0 * self.alpha * (u * w.conj()).re - self.alpha * w.norm_sqr()
    }

    /// Exact inner product of polynomials: `Σ_k p_k conj(q_k) · k!/α^k`.
    pub fn inner_product(&self, p: &Poly, q: &Poly) -> Complex64 {
        let n = p.coeffs().len().min(q.coeffs().len());
        let mut acc = Complex64::ZERO;
        for k in 0..n {
            let weight = (ln_factorial(k as u64) - k as f64 * self.alpha.ln()).exp();
            acc += p.coeff(k) * q.coeff(k).conj() * weight;
        }
        acc
    }

    pub fn norm_sq(&self, p: &Poly) -> f64 {
        self.inner_product(p, p).re
    }

    /// Expands a polynomial over the orthonormal basis: entry n is
    /// `⟨p, e_n⟩ = p_n ||z^n||`. Requires `len > deg(p)` so nothing is lost.
    pub fn expand_in_basis(
        &self,
        p: &Poly,
        len: usize,
    ) -> Result<BasisCoefficients, TruncationError> {
        if let Some(d) = p.degree() {
            if len <= d {
                return Err(TruncationError {
                    requested: len,
                    needed: d + 1,
                });
            }
        }
        let mut entries = vec![Complex64::ZERO; len];
        for (k, entry) in entries.iter_mut().enumerate() {
            let c = p.coeff(k);
            if c != Complex64::ZERO {
                *entry = c * self.monomial_norm(k);
            }
        }
        Ok(BasisCoefficients { entries })
    }

    /// `||∂K_w/∂w̄||² = α e^{α|w|²} (1 + α|w|²)`, the closed form of the
    /// derivative-kernel norm series `Σ |e_n'(w)|²`.
    pub fn dbar_kernel_norm_sq(&self, w: Complex64) -> f64 {
        let t = self.alpha * w.norm_sqr();
        self.alpha * t.exp() * (1.0 + t)
    }
}

/// Coefficients of a polynomial over the orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCoefficients {
    entries: Vec<Complex64>,
}

impl BasisCoefficients {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Squared 2-norm; equals the space norm² of the expanded polynomial.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Basis expansion was requested with fewer entries than the polynomial has
/// coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationError {
    pub requested: usize,
    pub needed: usize,
}

impl fmt::Display for TruncationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "basis expansion needs at least {} entries, got {}",
            self.needed, self.requested
        )
    }
}

impl std::error::Error for TruncationError {}
