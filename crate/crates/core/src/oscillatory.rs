//! Exponential sums Σ g(n)e^{2πif(n)} and the van der Corput transforms
//! that trade them for short sums of oscillatory integrals.
//!
//! Each transform is checked the same way: evaluate the sum directly, apply
//! the transform, and compare the deviation against the bound's stated shape
//! with an empirically fitted constant. The constants are measured, not
//! proved; `corpus` carries the parameter settings the fits are frozen on.

use crate::error::{Error, Result};
use crate::quad::{integrate_oscillatory, integrate_real, QuadConfig};
use crate::sum::ComplexCompensated;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

const TWO_PI: f64 = 2.0 * PI;
/// Quadrature budget per transform integral. Deviations of interest are
/// O(10⁻³) and up, so this is far below anything the fits can feel.
const INTEGRAL_TOL: f64 = 1e-9;
/// Points used when sampling derivative-based preconditions.
const GRID: usize = 1001;

/// Real function with a derivative on demand. The derivative is the supplied
/// closure when given, else a central difference with step
/// h = max(10⁻⁵, 10⁻⁸|x|); second derivatives difference the first, so they
/// carry ~10⁻⁶ of noise in the all-numeric case — fine for sign checks,
/// not for quadrature.
#[derive(Clone)]
pub struct SmoothFn {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl SmoothFn {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn { value: Arc::new(value), deriv: None }
    }

    pub fn with_deriv(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SmoothFn { value: Arc::new(value), deriv: Some(Arc::new(deriv)) }
    }

    pub fn constant(c: f64) -> Self {
        SmoothFn::with_deriv(move |_| c, |_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn step(x: f64) -> f64 {
        1e-5_f64.max(1e-8 * x.abs())
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.deriv {
            Some(d) => d(x),
            None => {
                let h = Self::step(x);
                (self.value(x + h) - self.value(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        let h = Self::step(x);
        (self.deriv(x + h) - self.deriv(x - h)) / (2.0 * h)
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.deriv.is_some() { "SmoothFn(analytic d/dx)" } else { "SmoothFn" })
    }
}

/// The sum Σ_{a<n<b} g(n)·e^{2πi f(n)} — amplitude g, phase f in cycles,
/// summation strictly inside the interval (integer endpoints drop out).
#[derive(Debug, Clone)]
pub struct ExpSumSpec {
    pub g: SmoothFn,
    pub f: SmoothFn,
    pub a: f64,
    pub b: f64,
}

impl ExpSumSpec {
    pub fn new(g: SmoothFn, f: SmoothFn, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::domain(format!("need finite a < b, got [{a}, {b}]")));
        }
        Ok(ExpSumSpec { g, f, a, b })
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, w) = (self.a, self.b - self.a);
        (0..GRID).map(move |i| a + w * i as f64 / (GRID - 1) as f64)
    }
}

/// Everything the transform bounds need besides the spec itself: the phase
/// slope range [α, β], the shift windows ε/θ/η, and the amplitude masses
/// G = |g(b)| + ∫|g′| (also G₁) and G₂ = max |g| within 1 of the endpoints.
#[derive(Debug, Clone, Copy)]
pub struct VdCParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub eta: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

impl VdCParams {
    /// Measure α, β, G, G₁, G₂ from the spec; ε, θ, η are the caller's.
    pub fn for_spec(spec: &ExpSumSpec, epsilon: f64, theta: f64, eta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::config(format!("theta must lie in (0, 1), got {theta}")));
        }
        if !(eta > 1.0) {
            return Err(Error::config(format!("eta must exceed 1, got {eta}")));
        }
        let mut alpha = f64::INFINITY;
        let mut beta = f64::NEG_INFINITY;
        for x in spec.grid() {
            let d = spec.f.deriv(x);
            alpha = alpha.min(d);
            beta = beta.max(d);
        }
        let g_fn = spec.g.clone();
        let (var, _) = integrate_real(
            move |x| g_fn.deriv(x).abs(),
            spec.a,
            spec.b,
            QuadConfig { tol: 1e-9, max_panels: 20_000, initial: 32 },
        )?;
        let g = spec.g.value(spec.b).abs() + var;
        let edge = |lo: f64, hi: f64| {
            (0..GRID)
                .map(|i| spec.g.value(lo + (hi - lo) * i as f64 / (GRID - 1) as f64).abs())
                .fold(0.0_f64, f64::max)
        };
        let g2 = edge(spec.a, spec.b.min(spec.a + 1.0)).max(edge(spec.a.max(spec.b - 1.0), spec.b));
        Ok(VdCParams { alpha, beta, epsilon, theta, eta, g, g1: g, g2 })
    }
}

/// Direct evaluation of the sum. Compensated, ascending n; the test suite
/// checks the reversed order lands within 10⁻¹².
pub fn exp_sum_direct(spec: &ExpSumSpec) -> Result<Complex64> {
    if spec.b - spec.a > 1e9 {
        return Err(Error::IntervalTooLong { terms: spec.b - spec.a });
    }
    let mut acc = ComplexCompensated::new();
    for n in integers_strictly_between(spec.a, spec.b) {
        let x = n as f64;
        acc.add(Complex64::from_polar(spec.g.value(x), TWO_PI * spec.f.value(x)));
    }
    Ok(acc.value())
}

fn integers_strictly_between(a: f64, b: f64) -> std::ops::RangeInclusive<i64> {
    (a.floor() as i64 + 1)..=(b.ceil() as i64 - 1)
}

/// ∫ₐᵇ g(x)·e^{2πi(f(x)−mx)}dx with panels kept under the local oscillation
/// wavelength so the Gauss–Kronrod rule always sees a resolved integrand.
pub fn oscillatory_integral(
    g: &SmoothFn,
    f: &SmoothFn,
    a: f64,
    b: f64,
    m: i64,
    tol: f64,
) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::config(format!("tol must be positive, got {tol}")));
    }
    let mf = m as f64;
    let (gv, fv, fd) = (g.clone(), f.clone(), f.clone());
    let r = integrate_oscillatory(
        move |x| Complex64::from_polar(gv.value(x), TWO_PI * (fv.value(x) - mf * x)),
        a,
        b,
        move |x| (fd.deriv(x) - mf).abs(),
        QuadConfig { tol, max_panels: 200_000, initial: 1 },
    )?;
    Ok(r.value)
}

fn require_convex(spec: &ExpSumSpec) -> Result<()> {
    for x in spec.grid() {
        let dd = spec.f.second_deriv(x);
        if !(dd > 0.0) {
            return Err(Error::invariant(format!("phase must have f'' > 0; f''({x}) = {dd}")));
        }
    }
    Ok(())
}

fn require_flat_curved(spec: &ExpSumSpec, theta: f64) -> Result<()> {
    let mut sign = 0.0_f64;
    for x in spec.grid() {
        let d = spec.f.deriv(x);
        if d.abs() > 1.0 - theta + 1e-12 {
            return Err(Error::invariant(format!(
                "phase slope must satisfy |f'| <= 1 - theta; f'({x}) = {d}"
            )));
        }
        let dd = spec.f.second_deriv(x);
        // "f'' nonzero" numerically: clear of the central-difference noise
        // floor and of one sign throughout.
        if dd.abs() < 1e-4 || (sign != 0.0 && dd.signum() != sign) {
            return Err(Error::invariant(format!(
                "phase must have f'' of one sign, |f''| >= 1e-4; f''({x}) = {dd}"
            )));
        }
        sign = dd.signum();
    }
    Ok(())
}

/// Sum the shifted integrals over integer m strictly inside (lo, hi).
fn shifted_integral_sum(spec: &ExpSumSpec, lo: f64, hi: f64) -> Result<(Complex64, usize)> {
    let ms: Vec<i64> = integers_strictly_between(lo, hi).collect();
    let parts: Vec<Complex64> = ms
        .par_iter()
        .map(|&m| oscillatory_integral(&spec.g, &spec.f, spec.a, spec.b, m, INTEGRAL_TOL))
        .collect::<Result<_>>()?;
    let mut acc = ComplexCompensated::new();
    for p in parts {
        acc.add(p);
    }
    Ok((acc.value(), ms.len()))
}

#[derive(Debug, Clone, Copy)]
pub struct Transform21 {
    pub value: Complex64,
    pub term_count: usize,
}

/// Convex-phase transform: the sum becomes Σ_{α−ε<m<β+ε} of shifted
/// integrals, off by O(G(ε⁻¹ + log(β−α+2))).
pub fn vdc_lemma21(spec: &ExpSumSpec, params: &VdCParams) -> Result<Transform21> {
    require_convex(spec)?;
    let (value, term_count) =
        shifted_integral_sum(spec, params.alpha - params.epsilon, params.beta + params.epsilon)?;
    Ok(Transform21 { value, term_count })
}

/// Deviation allowance for the convex-phase transform with unit constant.
pub fn budget21(params: &VdCParams) -> f64 {
    params.g * (1.0 / params.epsilon + (params.beta - params.alpha + 2.0).ln())
}

/// Flat-phase transform: with |f′| ≤ 1−θ and curved phase, the single m = 0
/// integral already carries the sum, off by O(Gθ⁻¹).
pub fn vdc_lemma22(spec: &ExpSumSpec, params: &VdCParams) -> Result<Complex64> {
    require_flat_curved(spec, params.theta)?;
    oscillatory_integral(&spec.g, &spec.f, spec.a, spec.b, 0, INTEGRAL_TOL)
}

pub fn budget22(params: &VdCParams) -> f64 {
    params.g / params.theta
}

#[derive(Debug, Clone, Copy)]
pub struct Transform23 {
    pub value: Complex64,
    pub error_budget: f64,
}

/// Wide-window variant of the convex-phase transform: shifts run over
/// (α−η, β+η) with η > 1, and the allowance splits into a bulk term on G₁
/// and an endpoint term on G₂.
pub fn vdc_lemma23(spec: &ExpSumSpec, params: &VdCParams) -> Result<Transform23> {
    if !(spec.b - spec.a > 2.0) {
        return Err(Error::invariant(format!(
            "wide-window transform needs b - a > 2, got {}",
            spec.b - spec.a
        )));
    }
    require_convex(spec)?;
    let (value, _) =
        shifted_integral_sum(spec, params.alpha - params.eta, params.beta + params.eta)?;
    Ok(Transform23 { value, error_budget: budget23(params) })
}

pub fn budget23(params: &VdCParams) -> f64 {
    let spread = params.beta - params.alpha;
    params.g1 * (1.0 / params.eta + (1.0 + spread / params.eta).ln())
        + params.g2 * (spread + params.eta)
}

// ---------------------------------------------------------------------------
// Named spec families and the fitted-constant corpus.
// ---------------------------------------------------------------------------

/// Quadratic phase f(x) = c·x²/2 (slope c·x, curvature c) with amplitude 1
/// or x^{−1/2}.
pub fn quadratic_spec(c: f64, a: f64, b: f64, half_power_amp: bool) -> Result<ExpSumSpec> {
    let f = SmoothFn::with_deriv(move |x| 0.5 * c * x * x, move |x| c * x);
    let g = if half_power_amp {
        if a <= 0.0 {
            return Err(Error::domain(format!("x^(-1/2) amplitude needs a > 0, got {a}")));
        }
        SmoothFn::with_deriv(|x| x.powf(-0.5), |x| -0.5 * x.powf(-1.5))
    } else {
        SmoothFn::constant(1.0)
    };
    ExpSumSpec::new(g, f, a, b)
}

/// One row of the near-diagonal second-moment sum: amplitude
/// x^{−1/2}·e^{−(t/2)log²(x/n)}, phase −(t/2π)·log(x/n), over the log-window
/// |log(x/n)| < 2√(log t / t). The natural shift window here is η = log t.
pub fn band_spec(t: f64, n: f64) -> Result<ExpSumSpec> {
    if !(t > 1.0 && n > 1.0) {
        return Err(Error::domain(format!("band family needs t > 1 and n > 1, got ({t}, {n})")));
    }
    let w = 2.0 * (t.ln() / t).sqrt();
    let (a, b) = (n * (-w).exp(), n * w.exp());
    let g = SmoothFn::with_deriv(
        move |x| {
            let l = (x / n).ln();
            x.powf(-0.5) * (-0.5 * t * l * l).exp()
        },
        move |x| {
            let l = (x / n).ln();
            -x.powf(-0.5) * (-0.5 * t * l * l).exp() * (0.5 + t * l) / x
        },
    );
    let f = SmoothFn::with_deriv(
        move |x| -t / TWO_PI * (x / n).ln(),
        move |x| -t / (TWO_PI * x),
    );
    ExpSumSpec::new(g, f, a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    L21,
    L22,
    L23,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::L21 => "21",
            Lemma::L22 => "22",
            Lemma::L23 => "23",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub label: String,
    pub lemma: Lemma,
    pub spec: ExpSumSpec,
    pub params: VdCParams,
}

/// Transform vs. direct sum for one case, with the deviation-to-budget
/// ratio the fitted-constant ceiling applies to.
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub label: String,
    pub lemma: Lemma,
    pub direct: Complex64,
    pub transform: Complex64,
    pub deviation: f64,
    pub budget: f64,
    pub ratio: f64,
    pub term_count: usize,
}

pub fn check_case(case: &CorpusCase) -> Result<LemmaCheck> {
    let direct = exp_sum_direct(&case.spec)?;
    let (transform, budget, term_count) = match case.lemma {
        Lemma::L21 => {
            let t = vdc_lemma21(&case.spec, &case.params)?;
            (t.value, budget21(&case.params), t.term_count)
        }
        Lemma::L22 => (vdc_lemma22(&case.spec, &case.params)?, budget22(&case.params), 1),
        Lemma::L23 => {
            let t = vdc_lemma23(&case.spec, &case.params)?;
            (t.value, t.error_budget, 0)
        }
    };
    let deviation = (direct - transform).norm();
    Ok(LemmaCheck {
        label: case.label.clone(),
        lemma: case.lemma,
        direct,
        transform,
        deviation,
        budget,
        ratio: deviation / budget,
        term_count,
    })
}

/// The frozen settings the fitted constants are measured on: quadratic
/// phases at several lengths, amplitudes, windows, and endpoint conventions,
/// plus near-diagonal band rows at realistic heights. 22 cases.
pub fn corpus() -> Result<Vec<CorpusCase>> {
    let mut cases = Vec::new();
    let mut push = |label: String, lemma: Lemma, spec: ExpSumSpec, eps: f64, th: f64, eta: f64| -> Result<()> {
        let params = VdCParams::for_spec(&spec, eps, th, eta)?;
        cases.push(CorpusCase { label, lemma, spec, params });
        Ok(())
    };

    for (n, eps, half, a_off) in [
        (50.0, 0.5, false, 0.0),
        (100.0, 0.5, false, 0.0),
        (200.0, 0.25, false, 0.5),
        (400.0, 1.0, false, 0.0),
        (100.0, 0.5, true, 0.0),
        (200.0, 0.5, true, 0.5),
        (80.0, 0.75, false, 1.5),
    ] {
        let (a, b) = (1.0 + a_off, n + a_off);
        let amp = if half { "x^-1/2" } else { "1" };
        push(
            format!("quadratic c=1/{n} g={amp} [{a},{b}] eps={eps}"),
            Lemma::L21,
            quadratic_spec(1.0 / n, a, b, half)?,
            eps,
            0.5,
            2.0,
        )?;
    }
    // One lattice point in the slope window: f' in [0.85, 0.98], eps = 1/2.
    push(
        "quadratic c=1/12 [10.25,11.75] eps=0.5".into(),
        Lemma::L21,
        quadratic_spec(1.0 / 12.0, 10.25, 11.75, false)?,
        0.5,
        0.5,
        2.0,
    )?;

    for (len, denom, neg, half, a_off) in [
        (100.0, 2.0, false, false, 0.0),
        (200.0, 2.0, false, false, 0.0),
        (400.0, 2.0, false, false, 0.5),
        (200.0, 2.0, false, true, 0.0),
        (200.0, 4.0, false, false, 0.0),
        (150.0, 2.0, true, false, 0.0),
        (300.0, 2.0, false, true, 1.5),
    ] {
        // Slope tops out at b·|c| = 1/denom, so theta = 1 - 1/denom.
        let (a, b) = (1.0 + a_off, len + a_off);
        let c = (if neg { -1.0 } else { 1.0 }) / (denom * b);
        let theta = 1.0 - 1.0 / denom;
        let amp = if half { "x^-1/2" } else { "1" };
        push(
            format!("quadratic c={:+.1e} g={amp} [{a},{b}] theta={theta}", c),
            Lemma::L22,
            quadratic_spec(c, a, b, half)?,
            0.5,
            theta,
            2.0,
        )?;
    }

    for (n, eta, half, a_off) in
        [(100.0, 10.0, false, 0.0), (200.0, 5.0, false, 0.0), (150.0, 8.0, true, 0.5)]
    {
        let (a, b) = (1.0 + a_off, n + a_off);
        let amp = if half { "x^-1/2" } else { "1" };
        push(
            format!("quadratic c=1/{n} g={amp} [{a},{b}] eta={eta}"),
            Lemma::L23,
            quadratic_spec(1.0 / n, a, b, half)?,
            0.5,
            0.5,
            eta,
        )?;
    }
    for (t, n) in [(1000.0, 1000.0), (1000.0, 2000.0), (2000.0, 2000.0), (500.0, 800.0)] {
        push(
            format!("band t={t} n={n} eta=log t"),
            Lemma::L23,
            band_spec(t, n)?,
            0.5,
            0.5,
            (t as f64).ln(),
        )?;
    }
    Ok(cases)
}
