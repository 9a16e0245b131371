//! Planar quadrature for Gaussian-decay integrands, in polar form: a
//! Gauss–Legendre rule in the radius tensored with a uniform trapezoid rule
//! in the angle, plus an annulus-doubling prober for integrals suspected of
//! diverging.
//!
//! Grids carry an analytic tail bound for the truncated region, recorded in
//! every result as the error estimate. Summation order is fixed and
//! compensated, so results are reproducible bit for bit.

use std::fmt;

use num_complex::Complex64;

/// Polar tensor-product grid over the disc `|z| <= radius`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    /// Radial nodes and weights on [0, radius]; weights include the
    /// Gauss–Legendre weight but not the polar Jacobian factor `r`.
    radial: Vec<(f64, f64)>,
    /// Number of angular nodes (uniform on [0, 2π)).
    angular: usize,
    radius: f64,
    /// Declared Gaussian decay rate of the integrand.
    beta: f64,
    /// Bound on the mass of `|z|^{2m} e^{-β|z|²}` beyond `radius`.
    tail_bound: f64,
}

/// Outcome of a planar integral: a finite value with an error estimate, or
/// an explicit divergence verdict with the annulus contributions that
/// triggered it.
#[derive(Clone, Debug, PartialEq)]
pub enum IntegralResult {
    Finite {
        value: f64,
        error_estimate: f64,
        annulus_trace: Vec<f64>,
    },
    Divergent {
        annulus_trace: Vec<f64>,
    },
}

impl IntegralResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralResult::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            IntegralResult::Finite { value, .. } => Some(*value),
            IntegralResult::Divergent { .. } => None,
        }
    }

    pub fn annulus_trace(&self) -> &[f64] {
        match self {
            IntegralResult::Finite { annulus_trace, .. }
            | IntegralResult::Divergent { annulus_trace } => annulus_trace,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadratureError {
    InvalidDecay(f64),
    InvalidTolerance(f64),
    /// The doubling schedule is too short to observe a trend.
    ScheduleTooShort(usize),
    /// The integrand produced NaN (or infinity, outside the prober) at a node.
    NonFiniteSample(Complex64),
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureError::InvalidDecay(b) => write!(f, "decay rate must be positive, got {b}"),
            QuadratureError::InvalidTolerance(t) => {
                write!(f, "tolerance must be positive, got {t}")
            }
            QuadratureError::ScheduleTooShort(n) => {
                write!(f, "divergence schedule needs at least 4 annuli, got {n}")
            }
            QuadratureError::NonFiniteSample(z) => {
                write!(f, "integrand is not finite at z = {z}")
            }
        }
    }
}

impl std::error::Error for QuadratureError {}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    // mirror to the negative half, keeping nodes sorted ascending
    let mut out = Vec::with_capacity(n);
    for &(x, w) in rule.iter() {
        out.push((-x, w));
    }
    if n % 2 == 1 {
        out.pop();
    }
    for &(x, w) in rule.iter().rev() {
        out.push((x, w));
    }
    out
}

/// Maps a [-1, 1] rule onto [a, b].
fn mapped_rule(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, w * half))
        .collect()
}

/// Bound on `∫_{|z|>R} |z|^{2m} e^{-β|z|²} dm`, valid once `βR² >= m + 1`:
/// the incomplete-gamma tail is at most `(m+1) x^m e^{-x}` at `x = βR²`.
fn gaussian_tail_bound(beta: f64, m: u32, x: f64) -> f64 {
    (std::f64::consts::PI / beta) * (m as f64 + 1.0) * (m as f64 * x.ln() - x).exp()
}

/// Smallest `x = βR²` with `gaussian_tail_bound(β, m, x) <= tol/2`, as the
/// fixed point of `x = ln(2π(m+1)/(β·tol)) + m·ln x`, iterated to
/// convergence so the radius is strictly monotone in the tolerance.
fn solve_tail_radius(beta: f64, m: u32, tol: f64) -> f64 {
    let c0 = (2.0 * std::f64::consts::PI * (m as f64 + 1.0) / (beta * tol)).ln();
    let mut x = (m as f64 + 2.0).max(c0.max(2.0));
    for _ in 0..200 {
        let next = c0 + m as f64 * x.ln();
        if (next - x).abs() < 1e-9 {
            break;
        }
        x = next;
    }
    x = x.max(m as f64 + 2.0);
    while gaussian_tail_bound(beta, m, x) > 0.5 * tol {
        x += 1.0;
    }
    x
}

impl QuadratureGrid {
    /// Grid for integrands bounded by `C·|z|^degree_hint · e^{-β|z|²}`.
    ///
    /// The truncation radius solves the Gaussian tail bound for `tol/2`, and
    /// node counts scale with `β·R²` so the discretization error sits well
    /// below the recorded tail bound.
    pub fn gaussian(beta: f64, tol: f64, degree_hint: usize) -> Result<Self, QuadratureError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(QuadratureError::InvalidDecay(beta));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(QuadratureError::InvalidTolerance(tol));
        }
        let m = (degree_hint as u32).div_ceil(2) + 1;
        let x = solve_tail_radius(beta, m, tol);
        let radius = (x / beta).sqrt();
        // node count leaves the discretization error far below the tail
        // bound, so refinement accuracy is governed by the truncation alone
        let n_r = 32.max((1.5 * x).ceil() as usize + degree_hint + 8);
        let angular = (2 * degree_hint + 16).max(20);
        Ok(QuadratureGrid {
            radial: mapped_rule(n_r, 0.0, radius),
            angular,
            radius,
            beta,
            tail_bound: gaussian_tail_bound(beta, m, x),
        })
    }

    /// Grid for a Gaussian concentrated at distance `center_radius` from the
    /// origin, as arises when a kernel factor recenters the mass at `ā w`.
    ///
    /// `angular_rate` is the angular frequency of the integrand per unit
    /// radius (for `e^{c·r·cos θ}` factors, `c`); the trapezoid rule needs
    /// enough nodes to clear the resulting bandwidth `angular_rate · R`.
    pub fn shifted_gaussian(
        beta: f64,
        center_radius: f64,
        tol: f64,
        degree_hint: usize,
        angular_rate: f64,
    ) -> Result<Self, QuadratureError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(QuadratureError::InvalidDecay(beta));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(QuadratureError::InvalidTolerance(tol));
        }
        let m = (degree_hint as u32).div_ceil(2) + 1;
        let x = solve_tail_radius(beta, m, tol);
        let radius = center_radius.max(0.0) + (x / beta).sqrt();
        let n_r = 32.max((beta * radius * radius).ceil() as usize + degree_hint + 8);
        let angular = (2 * degree_hint + 16)
            .max(20)
            .max((2.2 * angular_rate.abs() * radius).ceil() as usize + 32);
        Ok(QuadratureGrid {
            radial: mapped_rule(n_r, 0.0, radius),
            angular,
            radius,
            beta,
            tail_bound: gaussian_tail_bound(beta, m, x),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn node_count(&self) -> usize {
        self.radial.len() * self.angular
    }

    /// Integrates a nonnegative pointwise evaluator over the plane.
    pub fn integrate<F>(&self, f: F) -> Result<IntegralResult, QuadratureError>
    where
        F: Fn(Complex64) -> f64,
    {
        let dtheta = 2.0 * std::f64::consts::PI / self.angular as f64;
        let mut sum = NeumaierSum::new();
        for &(r, w_r) in &self.radial {
            for j in 0..self.angular {
                let theta = j as f64 * dtheta;
                let z = Complex64::from_polar(r, theta);
                let v = f(z);
                if !v.is_finite() {
                    return Err(QuadratureError::NonFiniteSample(z));
                }
                sum.add(v * w_r * r * dtheta);
            }
        }
        Ok(IntegralResult::Finite {
            value: sum.total(),
            error_estimate: self.tail_bound,
            annulus_trace: Vec::new(),
        })
    }

    /// Same nodes, complex-valued integrand. Plumbing for matrix-entry
    /// cross-checks; carries no divergence semantics.
    pub fn integrate_complex<F>(&self, f: F) -> Result<Complex64, QuadratureError>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let dtheta = 2.0 * std::f64::consts::PI / self.angular as f64;
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for &(r, w_r) in &self.radial {
            for j in 0..self.angular {
                let theta = j as f64 * dtheta;
                let z = Complex64::from_polar(r, theta);
                let v = f(z);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(QuadratureError::NonFiniteSample(z));
                }
                re.add(v.re * w_r * r * dtheta);
                im.add(v.im * w_r * r * dtheta);
            }
        }
        Ok(Complex64::new(re.total(), im.total()))
    }
}

/// Annulus-doubling schedule for the divergence prober, together with the
/// (configurable, always-recorded) trigger heuristics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSettings {
    /// Innermost annulus boundary; annuli are `(r0·2^k, r0·2^{k+1}]`.
    pub r0: f64,
    /// Number of annuli in the schedule.
    pub doublings: usize,
    /// Number of consecutive non-decreasing annulus contributions that
    /// declares divergence.
    pub trigger_run: usize,
    /// Annuli skipped before the trigger window opens.
    pub skip: usize,
    /// Radial nodes per annulus.
    pub radial_nodes: usize,
    /// Angular nodes.
    pub angular_nodes: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            r0: 1.0,
            doublings: 10,
            trigger_run: 3,
            skip: 1,
            radial_nodes: 48,
            angular_nodes: 64,
        }
    }
}

/// Integrates annulus by annulus with doubling radii, declaring divergence
/// once `trigger_run` consecutive contributions beyond the skip index fail
/// to decay (and the run carries positive mass).
///
/// Infinite annulus contributions are tolerated — they are the strongest
/// possible divergence signal — but NaN is an integrand error.
pub fn probe_divergence<F>(f: F, settings: &ProbeSettings) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(Complex64) -> f64,
{
    if settings.doublings < 4 {
        return Err(QuadratureError::ScheduleTooShort(settings.doublings));
    }
    if !(settings.r0.is_finite() && settings.r0 > 0.0) {
        return Err(QuadratureError::InvalidTolerance(settings.r0));
    }

    let dtheta = 2.0 * std::f64::consts::PI / settings.angular_nodes as f64;
    let ring = |a: f64, b: f64| -> Result<f64, QuadratureError> {
        let mut sum = NeumaierSum::new();
        let mut saw_inf = false;
        for (r, w_r) in mapped_rule(settings.radial_nodes, a, b) {
            for j in 0..settings.angular_nodes {
                let z = Complex64::from_polar(r, j as f64 * dtheta);
                let v = f(z);
                if v.is_nan() {
                    return Err(QuadratureError::NonFiniteSample(z));
                }
                if v.is_infinite() {
                    saw_inf = true;
                } else {
                    sum.add(v * w_r * r * dtheta);
                }
            }
        }
        Ok(if saw_inf { f64::INFINITY } else { sum.total() })
    };

    let inner = ring(0.0, settings.r0)?;
    let mut trace = Vec::with_capacity(settings.doublings);
    let mut run = 1usize;
    for k in 0..settings.doublings {
        let a = settings.r0 * (1u64 << k) as f64;
        let c = ring(a, 2.0 * a)?;
        trace.push(c);
        if k > settings.skip {
            let prev = trace[k - 1];
            if c >= prev && c > 0.0 {
                run += 1;
            } else {
                run = 1;
            }
            if run >= settings.trigger_run {
                return Ok(IntegralResult::Divergent {
                    annulus_trace: trace,
                });
            }
        }
    }

    let mut total = NeumaierSum::new();
    total.add(inner);
    for &c in &trace {
        total.add(c);
    }
    let error_estimate = trace.last().copied().unwrap_or(0.0).max(0.0);
    Ok(IntegralResult::Finite {
        value: total.total(),
        error_estimate,
        annulus_trace: trace,
    })
}

/// Neumaier-compensated accumulator; deterministic for a fixed add order.
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn new() -> Self {
        NeumaierSum {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
