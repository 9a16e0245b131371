//! Complex-coefficient polynomials: the symbol class for every operator here.
//!
//! Coefficients are stored lowest degree first and kept canonical: the vector
//! is either empty (the zero polynomial) or ends in a nonzero coefficient.
//! All calculus needed by the integral operators — derivative, antiderivative
//! vanishing at the origin, composition, products — is exact up to f64
//! rounding of the coefficient arithmetic.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;

/// A polynomial with complex coefficients, `coeff(k)` multiplying `z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from coefficients (lowest degree first),
    /// trimming trailing zeros to keep the canonical form.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.canonicalize();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        if c == Complex64::ZERO {
            return Poly::zero();
        }
        let mut coeffs = vec![Complex64::ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// The identity symbol `z`.
    pub fn identity() -> Self {
        Poly::monomial(Complex64::new(1.0, 0.0), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    fn canonicalize(&mut self) {
        while self
            .coeffs
            .last()
            .is_some_and(|c| *c == Complex64::ZERO)
        {
            self.coeffs.pop();
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficient-wise derivative.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() < 2 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i as f64 + 1.0))
                .collect(),
        )
    }

    /// The antiderivative `Q` with `Q(0) = 0` and `Q' = self`.
    pub fn antiderivative0(&self) -> Poly {
        if self.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::ZERO);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        Poly::new(coeffs)
    }

    /// `self ∘ inner`, expanded by Horner over polynomials.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c);
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::new(coeffs)
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}

/// An affine symbol `a·z + b`, the only shape compatible with compactness of
/// the generalized companion operators (and then only when `|a| < 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub a: Complex64,
    pub b: Complex64,
}

impl AffineMap {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        AffineMap { a, b }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(vec![self.b, self.a])
    }

    /// Reads an affine map off a polynomial of degree <= 1.
    pub fn from_poly(p: &Poly) -> Option<AffineMap> {
        match p.degree() {
            None => Some(AffineMap::new(Complex64::ZERO, Complex64::ZERO)),
            Some(0) => Some(AffineMap::new(Complex64::ZERO, p.coeff(0))),
            Some(1) => Some(AffineMap::new(p.coeff(1), p.coeff(0))),
            _ => None,
        }
    }
}

/// Failure to parse a complex literal or coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsePolyError {
    token: String,
}

impl fmt::Display for ParsePolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid complex literal `{}`", self.token)
    }
}

impl std::error::Error for ParsePolyError {}

/// Parses a complex literal: `3`, `-0.5i`, `1+2i`, `2.5-1i`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64, ParsePolyError> {
    let t = s.trim();
    let err = || ParsePolyError {
        token: t.to_string(),
    };
    if t.is_empty() {
        return Err(err());
    }

    // Split at the sign that separates real and imaginary parts: a '+'/'-'
    // that is not the leading sign and not part of an exponent (`1e-3`).
    let bytes = t.as_bytes();
    let mut split = None;
    for i in 1..bytes.len() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
        }
    }

    let parse_imag = |s: &str| -> Result<f64, ParsePolyError> {
        let body = s.strip_suffix(['i', 'I']).ok_or_else(err)?;
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => body.parse::<f64>().map_err(|_| err()),
        }
    };

    match split {
        Some(i) => {
            let re: f64 = t[..i].parse().map_err(|_| err())?;
            let im = parse_imag(&t[i..])?;
            Ok(Complex64::new(re, im))
        }
        None => {
            if t.ends_with(['i', 'I']) {
                Ok(Complex64::new(0.0, parse_imag(t)?))
            } else {
                Ok(Complex64::new(t.parse().map_err(|_| err())?, 0.0))
            }
        }
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl FromStr for Poly {
    type Err = ParsePolyError;

    /// Comma-separated coefficients, lowest degree first: `0,1` is `z`,
    /// `1,0,-0.5i` is `1 - 0.5i·z²`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(Poly::zero());
        }
        let coeffs = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|&c| format_complex(c)).collect();
        write!(f, "{}", parts.join(","))
    }
}
