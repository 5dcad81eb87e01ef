//! The second-moment cross terms and lattice sums behind E|ζ(1/2+iX_t)|².
//!
//! Everything here orbits one kernel, (1 + i·log(u/v))^(-t-p): the unit-square
//! double integral a1, the sawtooth integrals a2 (in two analytically equal
//! forms), the band-restricted double integral a3, the point/cell lattice
//! terms whose sums telescope against each other, and the damped oscillatory
//! band sums s5/s1/s2. All sums run in a fixed order with compensated
//! accumulation, so results are identical no matter how many threads rayon
//! gets.

use crate::complex::{kernel, log_one_plus_iw, pow_one_plus_iw, KernelArgs};
use crate::error::{Error, Result};
use crate::gamma::{sample_batch, GammaParams};
use crate::quad::{integrate_2d, integrate_oscillatory, QuadConfig};
use crate::sum::{Compensated, ComplexCompensated};
use crate::zeta::{zeta_half_line_batch, EvalConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Hard ceiling on enumerated lattice cells in one `lattice_sum` call.
const CELL_BUDGET: u64 = 50_000_000;

/// Per-window cell allowance for the off-diagonal tail probes. Sized so the
/// cell-integral pass stays near a second per window.
const WINDOW_CELL_BUDGET: u64 = 200_000;

/// Cubic-term phase drift allowed per recurrence block (radians).
const BLOCK_DRIFT: f64 = 2e-7;

/// exp(-45) ≈ 3e-20: a damped term below this is dropped without evaluation.
const DEAD_EXPONENT: f64 = 45.0;

// ---------------------------------------------------------------------------
// Region geometry
// ---------------------------------------------------------------------------

/// The region 1 < u, v < t⁴ with |log(u/v)| < 2√(log t / t), plus the integer
/// row slices cut from it. An optional row restriction turns the full lattice
/// (astronomical for interesting t) into a window that can be enumerated.
#[derive(Debug, Clone, Copy)]
pub struct RegionSpec {
    pub t: f64,
    pub u_max: f64,
    pub band_halfwidth: f64,
    rows: Option<(u64, u64)>,
}

impl RegionSpec {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 2.0 && t <= 1e6) {
            return Err(Error::domain(format!("region wants 2 <= t <= 1e6, got {t}")));
        }
        Ok(RegionSpec {
            t,
            u_max: t.powi(4),
            band_halfwidth: 2.0 * (t.ln() / t).sqrt(),
            rows: None,
        })
    }

    /// Restrict enumeration to rows n_lo..=n_hi (both within the region).
    pub fn restricted_to_rows(mut self, n_lo: u64, n_hi: u64) -> Result<Self> {
        if n_lo < 1 || n_lo > n_hi || (n_hi as f64 + 1.0) >= self.u_max {
            return Err(Error::domain(format!(
                "row window [{n_lo}, {n_hi}] does not sit inside 1..t^4 = {:.3e}",
                self.u_max
            )));
        }
        self.rows = Some((n_lo, n_hi));
        Ok(self)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        1.0 < u
            && u < self.u_max
            && 1.0 < v
            && v < self.u_max
            && (u.ln() - v.ln()).abs() < self.band_halfwidth
    }

    /// Row span to enumerate: the restriction if set, else every row of the
    /// full region (clamped into u64 range; full spans are caught by the cell
    /// budget long before the clamp matters).
    pub fn rows(&self) -> (u64, u64) {
        match self.rows {
            Some(r) => r,
            None => (1, (self.u_max - 2.0).min(9.0e18).max(1.0) as u64),
        }
    }

    /// Two-sided slice: m ≥ 1 with |log((m+1)/(n+1))| < band_halfwidth and
    /// m+1 < t⁴. None when the slice is empty.
    pub fn row_slice(&self, n: u64) -> Option<(u64, u64)> {
        let w = self.band_halfwidth;
        let lo = (n as f64 + 1.0) * (-w).exp() - 1.0;
        let hi = (n as f64 + 1.0) * w.exp() - 1.0;
        self.clip(lo.floor() + 1.0, hi.ceil() - 1.0)
    }

    /// One-sided slice: 0 < log((m+1)/(n+1)) < band_halfwidth.
    pub fn row_slice_plus(&self, n: u64) -> Option<(u64, u64)> {
        let hi = (n as f64 + 1.0) * self.band_halfwidth.exp() - 1.0;
        self.clip(n as f64 + 1.0, hi.ceil() - 1.0)
    }

    /// Shifted one-sided slice: 1 < (m+1)/(n+δ) < 1 + band_halfwidth. Note
    /// the linear upper edge: it matches `row_slice_plus` exactly only while
    /// (n+1)·(e^w − 1 − w) < 1, i.e. on small rows.
    pub fn row_slice_plus_delta(&self, n: u64, delta: f64) -> Option<(u64, u64)> {
        let x = n as f64 + delta;
        let lo = x - 1.0; // m > n + δ − 1
        let hi = x * (1.0 + self.band_halfwidth) - 1.0;
        self.clip(lo.floor() + 1.0, hi.ceil() - 1.0)
    }

    fn clip(&self, m_lo: f64, m_hi: f64) -> Option<(u64, u64)> {
        let lo = m_lo.max(1.0);
        let hi = m_hi.min(self.u_max - 2.0);
        if lo > hi {
            return None;
        }
        Some((lo as u64, hi as u64))
    }
}

// ---------------------------------------------------------------------------
// Lattice terms
// ---------------------------------------------------------------------------

/// Which lattice term to sum: the point term evaluated at the cell corner, or
/// the cell-averaged term that integrates the same kernel across the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Point,
    Integrated,
}

/// Point term ((m+1)(n+1))^(-1/2) · exp(−t(i·L + L²/2)), L = log((m+1)/(n+1)).
/// On the diagonal it collapses to exactly 1/(n+1).
pub fn point_term(t: f64, m: u64, n: u64) -> Result<Complex64> {
    if !(t > 0.0) || m < 1 || n < 1 {
        return Err(Error::domain(format!(
            "point term wants t > 0 and m, n >= 1, got t={t}, m={m}, n={n}"
        )));
    }
    let (mp1, np1) = (m as f64 + 1.0, n as f64 + 1.0);
    let l = ratio_log(mp1, np1);
    let amp = 1.0 / (mp1 * np1).sqrt();
    Ok(Complex64::from_polar(amp * (-0.5 * t * l * l).exp(), -t * l))
}

/// Cell-averaged companion of `point_term`:
/// (m+1)^(-1/2) ∫_n^{n+1} v^(-1/2) exp(−t(i·Λ + Λ²/2)) dv, Λ = log((m+1)/v).
pub fn integrated_term(t: f64, m: u64, n: u64) -> Result<Complex64> {
    if !(t > 0.0 && t <= 1e6) || m < 1 || n < 1 {
        return Err(Error::domain(format!(
            "integrated term wants 0 < t <= 1e6 and m, n >= 1, got t={t}, m={m}, n={n}"
        )));
    }
    let mp1 = m as f64 + 1.0;
    let lm = mp1.ln();
    let f = |v: f64| {
        let l = lm - v.ln();
        Complex64::from_polar(v.powf(-0.5) * (-0.5 * t * l * l).exp(), -t * l)
    };
    // Phase is −t·log((m+1)/v): rate t/v, i.e. t/(2πv) cycles per unit.
    let freq = move |v: f64| t / (std::f64::consts::TAU * v);
    let mut cfg = QuadConfig::with_tol(1e-10);
    cfg.max_panels = 200_000;
    let r = integrate_oscillatory(f, n as f64, n as f64 + 1.0, freq, cfg)?;
    Ok(r.value / mp1.sqrt())
}

/// log(a/b) with the cancellation kept out of the logarithm when a ≈ b.
fn ratio_log(a: f64, b: f64) -> f64 {
    let r = a / b;
    if 0.5 < r && r < 2.0 {
        ((a - b) / b).ln_1p()
    } else {
        a.ln() - b.ln()
    }
}

/// Sum the chosen lattice term over every cell of the region (or of its row
/// restriction). Rows are independent work units; the reduction runs in row
/// order regardless of thread count.
pub fn lattice_sum(t: f64, region: &RegionSpec, kind: TermKind) -> Result<Complex64> {
    if !(t >= 2.0 && t <= 1e4) {
        return Err(Error::config(format!("lattice sums are limited to 2 <= t <= 1e4, got {t}")));
    }
    if (t - region.t).abs() > 1e-12 * t {
        return Err(Error::config(format!(
            "region was built for t = {}, asked to sum at t = {t}",
            region.t
        )));
    }
    let (n_lo, n_hi) = region.rows();

    // Closed-form cell estimate first so a hopeless request fails fast, then
    // an exact per-row count for the admissible ones.
    let per_row = 2.0 * region.band_halfwidth.sinh();
    let est = 0.5 * per_row * ((n_hi as f64 + 2.0).powi(2) - (n_lo as f64).powi(2));
    if est > 4.0 * CELL_BUDGET as f64 {
        return Err(Error::RegionTooLarge { cells: est.min(1.8e19) as u64, budget: CELL_BUDGET });
    }
    let mut cells: u64 = 0;
    for n in n_lo..=n_hi {
        if let Some((lo, hi)) = region.row_slice(n) {
            cells += hi - lo + 1;
        }
        if cells > CELL_BUDGET {
            return Err(Error::RegionTooLarge { cells, budget: CELL_BUDGET });
        }
    }

    let rows: Vec<u64> = (n_lo..=n_hi).collect();
    let partials: Result<Vec<Complex64>> = rows
        .par_iter()
        .map(|&n| -> Result<Complex64> {
            let mut acc = ComplexCompensated::new();
            if let Some((m_lo, m_hi)) = region.row_slice(n) {
                for m in m_lo..=m_hi {
                    let term = match kind {
                        TermKind::Point => point_term(t, m, n)?,
                        TermKind::Integrated => integrated_term(t, m, n)?,
                    };
                    acc.add(term);
                }
            }
            Ok(acc.value())
        })
        .collect();
    let mut total = ComplexCompensated::new();
    for p in partials? {
        total.add(p);
    }
    Ok(total.value())
}

/// Geometric row windows sampling the far off-diagonal range t < n < t⁴.
/// Window j starts near t^(1+0.3j); each window is sized to stay inside the
/// per-window cell budget, and windows whose single row already exceeds it
/// are dropped (for larger t this caps the reachable power of t).
pub fn tail_windows(t: f64) -> Result<Vec<(u64, u64)>> {
    if !(t >= 10.0 && t <= 1e4) {
        return Err(Error::domain(format!("tail windows want 10 <= t <= 1e4, got {t}")));
    }
    let region = RegionSpec::new(t)?;
    let per_row = 2.0 * region.band_halfwidth.sinh();
    let mut out = Vec::new();
    for j in 0..10 {
        let start = t.powf(1.0 + 0.3 * j as f64);
        let n_lo = (start.floor() as u64 + 1).max(t.floor() as u64 + 1);
        let cells_per_row = (per_row * (n_lo as f64 + 2.0)).ceil() as u64 + 2;
        if cells_per_row > WINDOW_CELL_BUDGET {
            break;
        }
        let rows = (WINDOW_CELL_BUDGET / cells_per_row).clamp(1, 2000);
        let n_hi = (n_lo + rows - 1).min((region.u_max - 3.0) as u64);
        out.push((n_lo, n_hi));
    }
    Ok(out)
}

/// Σ 1/(n+1) over 1 ≤ n ≤ t: what the point terms collapse to on the diagonal.
pub fn diagonal_point_sum(t: f64) -> f64 {
    let mut acc = Compensated::new();
    for n in 1..=(t.floor() as u64) {
        acc.add(1.0 / (n as f64 + 1.0));
    }
    acc.value()
}

/// Σ over 1 ≤ n ≤ t of ∫_1^{1+1/n} v^(-3/2) exp(−t(i·log v + log²v / 2)) dv —
/// the diagonal cell-averaged sum after mapping each cell to a unit ratio
/// interval. The Gaussian factor kills the integrand past
/// log v ≈ √(2·45/t), so each row is integrated only over its live part
/// (the dropped remainder is below e⁻⁴⁵ per row).
pub fn diagonal_averaged_sum(t: f64) -> Result<Complex64> {
    if !(t >= 1.0 && t <= 1e6) {
        return Err(Error::domain(format!("diagonal sum wants 1 <= t <= 1e6, got {t}")));
    }
    let live = ((2.0 * DEAD_EXPONENT / t).sqrt()).exp_m1(); // v − 1 where damping hits e⁻⁴⁵
    let rows: Vec<u64> = (1..=(t.floor() as u64)).collect();
    let partials: Result<Vec<Complex64>> = rows
        .par_iter()
        .map(|&n| -> Result<Complex64> {
            let hi = (1.0 + 1.0 / n as f64).min(1.0 + live);
            let f = |v: f64| {
                let l = v.ln();
                Complex64::from_polar(v.powf(-1.5) * (-0.5 * t * l * l).exp(), -t * l)
            };
            let freq = move |v: f64| t * (1.0 + v.ln()) / (std::f64::consts::TAU * v);
            let mut cfg = QuadConfig::with_tol(1e-12);
            cfg.max_panels = 100_000;
            Ok(integrate_oscillatory(f, 1.0, hi, freq, cfg)?.value)
        })
        .collect();
    let mut acc = ComplexCompensated::new();
    for p in partials? {
        acc.add(p);
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Cross terms a1, a2, a3
// ---------------------------------------------------------------------------

/// Which cross term to evaluate. The two a2 forms are analytically equal;
/// computing both from unrelated quadratures is the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossTerm {
    A1,
    A2Direct,
    A2Closed,
    A3,
}

pub fn compute_a(t: f64, which: CrossTerm, tol: f64) -> Result<Complex64> {
    if !(t >= 10.0 && t <= 1e3) {
        return Err(Error::domain(format!("cross terms want 10 <= t <= 1e3, got {t}")));
    }
    if !(tol >= 1e-12 && tol <= 1e-2) {
        return Err(Error::domain(format!("tolerance out of range: {tol}")));
    }
    match which {
        CrossTerm::A1 => a1_quad(t, tol),
        CrossTerm::A2Direct => a2_direct(t, tol),
        CrossTerm::A2Closed => a2_closed(t, tol),
        CrossTerm::A3 => a3_quad(t, tol, None),
    }
}

/// ∬_(0,1)² (uv)^(-1/2) (1 + i·log(u/v))^(-t) du dv, evaluated after u = w²,
/// v = z² (which removes both endpoint singularities) as
/// 4∬ (1 + 2i·log(w/z))^(-t) dw dz.
fn a1_quad(t: f64, tol: f64) -> Result<Complex64> {
    let f = |w: f64, z: f64| {
        if w <= 0.0 || z <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // Guarded above: u, v > 0 and t > 0 make the kernel infallible.
        kernel(KernelArgs { u: w * w, v: z * z, t, p: 0 }).unwrap_or(Complex64::new(0.0, 0.0))
    };
    let r = integrate_2d(f, (0.0, 1.0), (0.0, 1.0), 0.25 * tol, 400_000)?;
    Ok(4.0 * r.value)
}

/// Smallest dyadic cutoff M with the v > M remainder of either sawtooth
/// integral below tol/10. `direct` carries the extra factor from the
/// differentiated integrand.
fn sawtooth_cutoff(t: f64, tol: f64, direct: bool) -> u64 {
    let mut m = 64u64;
    while m < 65_536 {
        let lnm = (m as f64).ln();
        let damp = (1.0 + lnm * lnm).powf(-0.5 * t);
        let extra = if direct { 1.0 + 2.0 * t / (1.0 + lnm * lnm).sqrt() } else { 1.0 };
        if 2.0 * damp * extra / (m as f64).sqrt() <= 0.1 * tol {
            break;
        }
        m *= 2;
    }
    m
}

/// −∫_1^∞ {v} v^(-3/2) (1 − i·log v)^(-t) dv, one unit interval at a time so
/// the sawtooth stays smooth inside every panel.
fn a2_closed(t: f64, tol: f64) -> Result<Complex64> {
    let m = sawtooth_cutoff(t, tol, false);
    let per = 0.8 * tol / m as f64;
    let mut acc = ComplexCompensated::new();
    for n in 1..m {
        let f = |v: f64| {
            let l = v.ln();
            // (1 − i·log v)^(-t) = conj((1 + i·log v)^(-t)); exponent ≤ 0 so
            // the power cannot overflow.
            let k = pow_one_plus_iw(l, -t).unwrap_or(Complex64::new(0.0, 0.0)).conj();
            (v - n as f64) * v.powf(-1.5) * k
        };
        let freq = move |v: f64| t / (std::f64::consts::TAU * v * (1.0 + v.ln().powi(2)));
        let mut cfg = QuadConfig::with_tol(per);
        cfg.max_panels = 40_000;
        acc.add(integrate_oscillatory(f, n as f64, n as f64 + 1.0, freq, cfg)?.value);
    }
    Ok(-acc.value())
}

/// The same quantity from its defining iterated form
/// ∫_1^∞ {v} · d/dv [ v^(-1/2) ∫_0^1 u^(-1/2) (1 + i·log(u/v))^(-t) du ] dv,
/// with the derivative taken under the inner integral, so the only shared
/// ingredient with `a2_closed` is the kernel itself.
fn a2_direct(t: f64, tol: f64) -> Result<Complex64> {
    let m = sawtooth_cutoff(t, tol, true);
    let per = 0.8 * tol / m as f64;
    let inner_tol = 0.1 * tol / m as f64;
    let mut acc = ComplexCompensated::new();
    for n in 1..m {
        let f = |v: f64| {
            let lv = v.ln();
            let g = |w: f64| {
                if w <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let l = 2.0 * w.ln() - lv;
                let lg = log_one_plus_iw(l);
                let k0 = Complex64::new(-t * lg.re, -t * lg.im).exp();
                // d/dv of the kernel pulls down it/v · kernel^(1+1/t): fold the
                // −1/2 amplitude term and the t-term into one pass.
                2.0 * k0
                    * (Complex64::new(-0.5, 0.0)
                        + Complex64::new(0.0, t) / Complex64::new(1.0, l))
            };
            let gfreq = move |w: f64| {
                let l = 2.0 * w.ln() - lv;
                t / (std::f64::consts::PI * w.max(1e-12) * (1.0 + l * l))
            };
            let mut icfg = QuadConfig::with_tol(inner_tol);
            icfg.max_panels = 20_000;
            let inner = integrate_oscillatory(g, 0.0, 1.0, gfreq, icfg)
                .map(|r| r.value)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            (v - n as f64) * v.powf(-1.5) * inner
        };
        let freq = move |v: f64| t / (std::f64::consts::TAU * v * (1.0 + v.ln().powi(2)));
        let mut cfg = QuadConfig::with_tol(per);
        cfg.max_panels = 40_000;
        acc.add(integrate_oscillatory(f, n as f64, n as f64 + 1.0, freq, cfg)?.value);
    }
    Ok(acc.value())
}

/// t(t+1) ∬_R {u}{v} (uv)^(-3/2) (1 + i·log(u/v))^(-t-2) du dv over the band
/// region. Substituting u = v·e^ρ turns the inner v-integral into a sum of
/// exactly integrable rational pieces (between consecutive integer crossings
/// of v and v·e^ρ the integrand is e^ρ − (m + n·e^ρ)/v + nm/v²), leaving a
/// single oscillatory ρ-integral. The ρ ↔ −ρ halves are conjugate, so only
/// [0, w] is integrated and the value is exactly real.
///
/// Rows past the cutoff V are replaced by the mean-value tail
/// ¼(1/V − e^ρ/t⁴): {v}{v·e^ρ} averages to ¼ once the two sawtooths
/// decorrelate, and V = max(1000, 40t) keeps the residual fluctuation well
/// under the O(1) allowance this term carries anyway.
fn a3_quad(t: f64, tol: f64, v_override: Option<f64>) -> Result<Complex64> {
    let w = 2.0 * (t.ln() / t).sqrt();
    let v_cut = v_override.unwrap_or((40.0 * t).max(1000.0)).ceil();
    let scale = t * (t + 1.0);
    let f = |rho: f64| {
        let k = pow_one_plus_iw(rho, -(t + 2.0)).unwrap_or(Complex64::new(0.0, 0.0));
        Complex64::new((k * (-0.5 * rho).exp() * row_factor(rho, v_cut, t)).re, 0.0)
    };
    let freq = move |rho: f64| (t + 2.0) / (std::f64::consts::TAU * (1.0 + rho * rho));
    let mut cfg = QuadConfig::with_tol((0.5 * tol / scale).max(2e-10));
    cfg.max_panels = 400_000;
    let r = integrate_oscillatory(f, 0.0, w, freq, cfg)?;
    Ok(Complex64::new(2.0 * scale * r.value.re, 0.0))
}

/// ∫_1^V {v}{v·e^ρ} v^(-2) dv summed exactly piece by piece, plus the ¼-mean
/// tail up to t⁴·e^(-ρ).
fn row_factor(rho: f64, v_cut: f64, t: f64) -> f64 {
    let e_rho = rho.exp();
    let mut acc = Compensated::new();
    let mut n = 1u64;
    while (n as f64) < v_cut {
        let (lo, hi) = (n as f64, (n as f64 + 1.0).min(v_cut));
        // u = v·e^ρ crosses integers m at v = m/e^ρ; between crossings the
        // integrand is exactly e^ρ − (m + n·e^ρ)/v + nm/v².
        let mut p = lo;
        let m_last = (hi * e_rho).ceil() - 1.0;
        let mut m = (lo * e_rho).floor() + 1.0;
        loop {
            let q = if m <= m_last { (m / e_rho).min(hi) } else { hi };
            if q > p {
                let mid_m = (0.5 * (p + q) * e_rho).floor();
                let nn = n as f64;
                let piece = e_rho * (q - p) - (mid_m + nn * e_rho) * ((q - p) / p).ln_1p()
                    + nn * mid_m * (q - p) / (p * q);
                acc.add(piece);
            }
            if m > m_last {
                break;
            }
            p = q;
            m += 1.0;
        }
        n += 1;
    }
    acc.add(0.25 * (1.0 / v_cut - e_rho / t.powi(4)));
    acc.value()
}

// ---------------------------------------------------------------------------
// Reports and the Monte Carlo cross-reference
// ---------------------------------------------------------------------------

/// The three cross terms at one t, their real combination, and the Monte
/// Carlo value of E|ζ(1/2+iX_t) − 1|² they are supposed to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub t: f64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    /// Re a1 − 2·Re a2 + Re a3 (a1 and a3 are real up to quadrature residue).
    pub combined: f64,
    pub mc_reference: f64,
    pub quad_tol: f64,
}

/// Mean and standard error of |ζ(1/2+iX) − 1|² over a reproducible batch.
pub fn mc_second_moment_about_one(t: f64, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    if !(t >= 10.0) || n_samples < 100 {
        return Err(Error::domain(format!(
            "Monte Carlo reference wants t >= 10 and at least 100 samples, got t={t}, n={n_samples}"
        )));
    }
    let batch = sample_batch(GammaParams::new(t)?, n_samples, seed)?;
    let x_max = batch.values.iter().cloned().fold(0.0f64, f64::max);
    let mut cfg = EvalConfig::default();
    cfg.series_terms = Some(cfg.series_terms_for((t + 10.0 * t.sqrt()).max(x_max))?);
    let zs = zeta_half_line_batch(&batch.values, &cfg)?;
    let n = zs.len() as f64;
    let mut mean = Compensated::new();
    for z in &zs {
        mean.add((z - Complex64::new(1.0, 0.0)).norm_sqr());
    }
    let mean = mean.value() / n;
    let mut var = Compensated::new();
    for z in &zs {
        var.add(((z - Complex64::new(1.0, 0.0)).norm_sqr() - mean).powi(2));
    }
    Ok((mean, (var.value() / (n * (n - 1.0))).sqrt()))
}

/// Full report at one t: a2 enters through its closed form (the direct form
/// is the cross-validation target, not the production path).
pub fn decomposition_report(
    t: f64,
    tol: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<DecompositionReport> {
    let a1 = compute_a(t, CrossTerm::A1, tol)?;
    let a2 = compute_a(t, CrossTerm::A2Closed, tol)?;
    let a3 = compute_a(t, CrossTerm::A3, tol)?;
    let (mc, _se) = mc_second_moment_about_one(t, mc_samples, seed)?;
    Ok(DecompositionReport {
        t,
        a1,
        a2,
        a3,
        combined: a1.re - 2.0 * a2.re + a3.re,
        mc_reference: mc,
        quad_tol: tol,
    })
}

// ---------------------------------------------------------------------------
// Band sums
// ---------------------------------------------------------------------------

/// Gaussian damping convention for the band sums. `HalfSquare` keeps the ½
/// from the log² term the damping descends from; `AsPrinted` squares it away.
/// The as-printed weight is exactly the half-square weight squared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingVariant {
    HalfSquare,
    AsPrinted,
}

impl std::fmt::Display for DampingVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DampingVariant::HalfSquare => "half-square",
            DampingVariant::AsPrinted => "as-printed",
        })
    }
}

/// The three damped oscillatory band sums at one (t, δ, variant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSumReport {
    pub t: f64,
    pub delta: f64,
    pub s5: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
    pub variant: DampingVariant,
}

/// Both damping variants in one pass (the phase and amplitude recurrences are
/// shared; the second variant costs one extra real chain per term).
pub fn band_sums_pair(t: f64, delta: f64) -> Result<(BandSumReport, BandSumReport)> {
    if !(t >= 100.0 && t <= 1e6) {
        return Err(Error::domain(format!("band sums want 100 <= t <= 1e6, got {t}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta must sit in (0, 1], got {delta}")));
    }
    let logt = t.ln();
    let sq = (logt / t).sqrt();
    let x_mid = (t * logt).sqrt();
    let k_min = delta.floor() as i64 + 1; // smallest k with k − δ > 0

    // Inner band: ½√(t/log t) < n+δ < √(t·log t), 0 < k−δ ≤ 2(n+δ)√(log t/t).
    // Term counts stay in the tens of thousands, so these are evaluated
    // directly, k ascending inside n ascending.
    let mut s5h = ComplexCompensated::new();
    let mut s5a = ComplexCompensated::new();
    let mut n = (0.5 / sq - delta).floor() as i64 + 1;
    if n < 1 {
        n = 1;
    }
    while (n as f64 + delta) < x_mid {
        let x = n as f64 + delta;
        let k_hi = (2.0 * x * sq + delta).floor() as i64;
        for k in k_min..=k_hi {
            let kappa = k as f64 - delta;
            let r = kappa / x;
            let damp = (-0.5 * t * r * r).exp();
            let amp = 1.0 / (x * (x + kappa)).sqrt();
            let rot = Complex64::from_polar(1.0, -t * r * (1.0 - 0.5 * r));
            s5h.add(amp * damp * rot);
            s5a.add(amp * damp * damp * rot);
        }
        n += 1;
    }

    // Outer band, split by k: short rows share the full n-range, long rows
    // start where the damping admits them. Rows are independent; the k-order
    // reduction is fixed.
    let k_hi_1 = (2.0 * logt + delta).floor() as i64;
    let k_hi_2 = (2.0 * x_mid + delta).ceil() as i64 - 1; // κ < 2√(t·log t)
    let row = |k: i64, x_lo: f64| damped_row(t, delta, k as f64 - delta, x_lo, t);
    let sum_rows = |lo: i64, hi: i64, x_lo_of: &(dyn Fn(f64) -> f64 + Sync)| {
        let rows: Vec<(Complex64, Complex64)> = (lo..=hi)
            .into_par_iter()
            .map(|k| row(k, x_lo_of(k as f64 - delta)))
            .collect();
        let (mut h, mut a) = (ComplexCompensated::new(), ComplexCompensated::new());
        for (rh, ra) in rows {
            h.add(rh);
            a.add(ra);
        }
        (h.value(), a.value())
    };
    let (s1h, s1a) = sum_rows(k_min, k_hi_1, &|_| x_mid);
    let (s2h, s2a) = sum_rows(k_hi_1 + 1, k_hi_2, &|kappa| 0.5 * (t / logt).sqrt() * kappa);

    let report = |variant, s5: Complex64, s1: Complex64, s2: Complex64| BandSumReport {
        t,
        delta,
        s5,
        s1,
        s2,
        variant,
    };
    Ok((
        report(DampingVariant::HalfSquare, s5h.value(), s1h, s2h),
        report(DampingVariant::AsPrinted, s5a.value(), s1a, s2a),
    ))
}

pub fn band_sums(t: f64, delta: f64, variant: DampingVariant) -> Result<BandSumReport> {
    let (h, a) = band_sums_pair(t, delta)?;
    Ok(match variant {
        DampingVariant::HalfSquare => h,
        DampingVariant::AsPrinted => a,
    })
}

/// One damped row: Σ over integer n with x_lo < n+δ < x_hi of
/// (n+δ)^(-1/2) (n+k)^(-1/2) · damp · exp(−it(κ/x − κ²/2x²)), x = n+δ,
/// κ = k−δ, returned for both damping variants.
///
/// Terms advance through a block recurrence: within a block both log-amplitude
/// and phase are modelled quadratically (term *= step, step *= mult), which is
/// exact for the leading damping and phase curvature; block lengths are chosen
/// so the neglected cubic drift stays below BLOCK_DRIFT radians, and each
/// block restarts from a directly evaluated term.
fn damped_row(t: f64, delta: f64, kappa: f64, x_lo: f64, x_hi: f64) -> (Complex64, Complex64) {
    let mut acc_h = ComplexCompensated::new();
    let mut acc_a = ComplexCompensated::new();
    let mut n = (x_lo - delta).floor() as i64 + 1;
    let n_hi = ((x_hi - delta).ceil() as i64) - 1;
    if n < 1 {
        n = 1;
    }
    // Skip the dead start: while (t/2)κ²/x² > 45 every |term| < e⁻⁴⁵/x.
    let alive = kappa * (t / (2.0 * DEAD_EXPONENT)).sqrt();
    if (n as f64 + delta) < alive {
        n = n.max((alive - delta).floor() as i64 + 1);
    }
    while n <= n_hi {
        let x = n as f64 + delta;
        let (ix, ixk) = (1.0 / x, 1.0 / (x + kappa));
        let r = kappa * ix;
        // |phase‴| + |log-amp‴|, evaluated at the block start (both decay in x).
        let d3 = 6.0 * t * kappa * ix.powi(4) * (1.0 + 2.0 * r) + 24.0 * t * kappa * kappa * ix.powi(5)
            + 2.0 * ix.powi(3);
        let b = ((6.0 * BLOCK_DRIFT / d3).cbrt() as i64).clamp(1, 1 << 20).min(n_hi - n + 1);

        let l0 = -0.5 * (x.ln() + (x + kappa).ln()) - 0.5 * t * r * r;
        let l1 = -0.5 * ix - 0.5 * ixk + t * kappa * kappa * ix.powi(3);
        let l2 = 0.5 * ix * ix + 0.5 * ixk * ixk - 3.0 * t * kappa * kappa * ix.powi(4);
        let p0 = -t * r * (1.0 - 0.5 * r);
        let p1 = t * kappa * ix * ix * (1.0 - r);
        let p2 = t * kappa * ix.powi(3) * (3.0 * r - 2.0);
        let mut term = Complex64::from_polar(l0.exp(), p0);
        let mut step = Complex64::from_polar((l1 + 0.5 * l2).exp(), p1 + 0.5 * p2);
        let mult = Complex64::from_polar(l2.exp(), p2);
        // Extra half-square damping factor that turns variant one into two.
        let ld1 = t * kappa * kappa * ix.powi(3);
        let ld2 = -3.0 * t * kappa * kappa * ix.powi(4);
        let mut d = (-0.5 * t * r * r).exp();
        let mut dstep = (ld1 + 0.5 * ld2).exp();
        let dmult = ld2.exp();
        for _ in 0..b {
            acc_h.add(term);
            acc_a.add(term * d);
            term *= step;
            step *= mult;
            d *= dstep;
            dstep *= dmult;
        }
        n += b;
    }
    (acc_h.value(), acc_a.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn region_membership_is_symmetric_and_bounded() {
        let region = RegionSpec::new(100.0).unwrap();
        assert!((region.band_halfwidth - 2.0 * (100.0f64.ln() / 100.0).sqrt()).abs() < 1e-15);
        for &(u, v) in &[(2.0, 2.5), (10.0, 14.0), (1e7, 1.2e7), (3.0, 80.0), (0.5, 0.6)] {
            assert_eq!(region.contains(u, v), region.contains(v, u));
        }
        assert!(region.contains(50.0, 55.0));
        assert!(!region.contains(50.0, 90.0)); // off the band
        assert!(!region.contains(0.9, 1.0)); // below the box
        assert!(!region.contains(1.1e8, 1.1e8)); // above t⁴ = 1e8
    }

    #[test]
    fn row_slices_honor_their_inequalities() {
        let region = RegionSpec::new(100.0).unwrap();
        let w = region.band_halfwidth;
        for n in [1u64, 7, 100, 5001] {
            if let Some((lo, hi)) = region.row_slice(n) {
                for m in [lo, hi] {
                    let l = ((m as f64 + 1.0) / (n as f64 + 1.0)).ln();
                    assert!(l.abs() < w, "m={m} n={n} log ratio {l} vs {w}");
                }
                let l_out = ((hi as f64 + 2.0) / (n as f64 + 1.0)).ln();
                assert!(l_out >= w);
            }
            if let Some((lo, hi)) = region.row_slice_plus(n) {
                assert!(lo >= n + 1);
                let l = ((hi as f64 + 1.0) / (n as f64 + 1.0)).ln();
                assert!(0.0 < l && l < w);
            }
        }
    }

    #[test]
    fn shifted_slice_is_a_subset_of_the_log_slice_at_delta_one() {
        // At δ = 1 the shifted membership reads 1 < (m+1)/(n+1) < 1+w while
        // the log slice allows ratios up to e^w > 1+w: same lower edge,
        // shifted slice never wider, and the two separate whenever an integer
        // lands in the (n+1)·(e^w − 1 − w) sliver — which happens sporadically
        // even on small rows and almost always once the sliver passes width 1.
        let region = RegionSpec::new(1000.0).unwrap();
        let w = region.band_halfwidth;
        let mut diverged = false;
        for n in 1..=2000u64 {
            let shifted = region.row_slice_plus_delta(n, 1.0);
            let logged = region.row_slice_plus(n);
            match (shifted, logged) {
                (None, _) => {}
                (Some(_), None) => panic!("row {n}: shifted slice outside the log slice"),
                (Some((slo, shi)), Some((llo, lhi))) => {
                    assert_eq!(slo, llo, "row {n}: lower edges must coincide");
                    assert!(shi <= lhi, "row {n}: shifted slice outside the log slice");
                }
            }
            let x = n as f64 + 1.0;
            let sliver_is_empty = (x * (1.0 + w)).ceil() == (x * w.exp()).ceil();
            assert_eq!(shifted == logged, sliver_is_empty, "row {n}");
            diverged |= shifted != logged;
        }
        assert!(diverged, "expected the linear and exponential edges to separate");
    }

    #[test]
    fn point_term_diagonal_and_symmetry() {
        for n in [1u64, 2, 17, 999] {
            let f = point_term(50.0, n, n).unwrap();
            assert_relative_eq!(f.re, 1.0 / (n as f64 + 1.0), max_relative = 1e-15);
            assert!(f.im.abs() < 1e-18);
        }
        // Swapping (m, n) conjugates the term: the log flips sign.
        let a = point_term(30.0, 12, 9).unwrap();
        let b = point_term(30.0, 9, 12).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-14);
    }

    #[test]
    fn diagonal_point_sum_matches_harmonic_reference() {
        // Σ_{n=1..100} 1/(n+1), 30-digit reference 4.197278507738630161795.
        assert!((diagonal_point_sum(100.0) - 4.197278507738630161795).abs() < 1e-12);
    }

    #[test]
    fn integrated_term_matches_references() {
        // ∫_1^2 v^(-3/2) exp(−(i log v + log²v/2)) dv via the original form
        // (m+1)^(-1/2) ∫_n^{n+1} v^(-1/2)···, 25-digit quadrature reference.
        let g = integrated_term(1.0, 1, 1).unwrap();
        assert!((g.re - 0.5091891058907207053817382).abs() < 1e-10);
        assert!((g.im - -0.1648761891260709416815446).abs() < 1e-10);
        let g = integrated_term(5.0, 2, 1).unwrap();
        assert!((g.re - -0.1025711098812962125632326).abs() < 1e-10);
        assert!((g.im - -0.01780213073260637485433891).abs() < 1e-10);
    }

    #[test]
    fn diagonal_averaged_sum_agrees_with_both_forms() {
        // Same cell, two analytically equal integrals computed by different
        // code paths (ratio substitution vs original variable).
        let via_sub = diagonal_averaged_sum(1.0).unwrap();
        let via_orig = integrated_term(1.0, 1, 1).unwrap();
        assert!((via_sub - via_orig).norm() < 1e-9);
        // Ten-row reference from 25-digit quadrature.
        let ten = diagonal_averaged_sum(10.0).unwrap();
        assert!((ten - Complex64::new(0.663399314099716826406302, -0.9627743606590245930124802)).norm() < 1e-8);
    }

    #[test]
    fn diagonal_sums_track_log_t() {
        for &t in &[1e3, 1e4] {
            let g = diagonal_averaged_sum(t).unwrap();
            assert!(g.norm() <= 5.0, "t={t}: |averaged| = {}", g.norm());
            let gap = Complex64::new(diagonal_point_sum(t) - t.ln(), 0.0) - g;
            assert!(gap.norm() <= 3.0, "t={t}: gap = {}", gap.norm());
        }
    }

    #[test]
    fn lattice_sum_rejects_oversized_requests() {
        let region = RegionSpec::new(100.0).unwrap();
        match lattice_sum(100.0, &region, TermKind::Point) {
            Err(Error::RegionTooLarge { cells, budget }) => {
                assert!(cells > budget);
            }
            other => panic!("expected RegionTooLarge, got {other:?}"),
        }
        let big = RegionSpec::new(2e4);
        assert!(big.is_err() || lattice_sum(2e4, &big.unwrap(), TermKind::Point).is_err());
    }

    #[test]
    fn windowed_tail_cancellation_stays_bounded() {
        // Far off-diagonal rows: the point sum alone is not small, but the
        // point-minus-averaged difference stays O(1) on every window.
        let t = 100.0;
        let windows = tail_windows(t).unwrap();
        assert!(windows.len() >= 5, "got {} windows", windows.len());
        for &(lo, hi) in &windows {
            let region = RegionSpec::new(t).unwrap().restricted_to_rows(lo, hi).unwrap();
            let f = lattice_sum(t, &region, TermKind::Point).unwrap();
            let g = lattice_sum(t, &region, TermKind::Integrated).unwrap();
            assert!(
                (f - g).norm() <= 5.0,
                "window [{lo}, {hi}]: |F − G| = {}",
                (f - g).norm()
            );
        }
    }

    #[test]
    fn a1_matches_the_line_integral_reference() {
        // Collapsing the unit square along u/v gives
        // ∫ e^(-|w|/2) (1+iw)^(-t) dw; 25-digit references at t = 50, 100.
        let a1 = compute_a(50.0, CrossTerm::A1, 1e-8).unwrap();
        assert!((a1.re - 4.251209102575106189954229e-4).abs() < 1e-9);
        assert!(a1.im.abs() < 1e-8);
        let a1 = compute_a(100.0, CrossTerm::A1, 1e-8).unwrap();
        assert!((a1.re - 1.030687645508697378098493e-4).abs() < 1e-9);
        assert!(a1.norm() <= 4.0); // coarse bound: |kernel| ≤ 1, ∫u^(-1/2) = 2
    }

    #[test]
    fn a2_closed_matches_references() {
        let a2 = compute_a(50.0, CrossTerm::A2Closed, 1e-9).unwrap();
        assert!((a2.re - 4.260675092759612351431305e-4).abs() < 2e-9);
        assert!((a2.im - -1.48907840839404928463209e-7).abs() < 2e-9);
        let a2 = compute_a(20.0, CrossTerm::A2Closed, 1e-9).unwrap();
        assert!((a2.re - 3.696596359388128736531633e-3).abs() < 2e-9);
        assert!((a2.im - 4.006273732782192945280002e-4).abs() < 2e-9);
    }

    #[test]
    fn a2_direct_agrees_with_closed_form() {
        for &t in &[20.0, 50.0, 100.0] {
            let tol = 1e-8;
            let d = compute_a(t, CrossTerm::A2Direct, tol).unwrap();
            let c = compute_a(t, CrossTerm::A2Closed, tol).unwrap();
            assert!((d - c).norm() <= 2.0 * tol, "t={t}: gap {}", (d - c).norm());
        }
    }

    #[test]
    fn a3_is_stable_under_the_row_cutoff() {
        let lo = a3_quad(20.0, 1e-6, Some(800.0)).unwrap();
        let hi = a3_quad(20.0, 1e-6, Some(6400.0)).unwrap();
        assert!((lo - hi).norm() < 5e-3, "cutoff drift {}", (lo - hi).norm());
        assert_eq!(lo.im, 0.0); // real by construction
    }

    #[test]
    fn combined_cross_terms_match_monte_carlo() {
        let t = 20.0;
        let tol = 1e-6;
        let report = decomposition_report(t, tol, 4000, 7).unwrap();
        let (mc, se) = mc_second_moment_about_one(t, 4000, 7).unwrap();
        assert_eq!(report.mc_reference, mc);
        assert!(report.a1.im.abs() + report.a3.im.abs() <= 10.0 * tol);
        let gap = (report.combined - mc).abs();
        // 3·se Monte Carlo noise + quadrature budget + the O(1) allowance the
        // a3 band truncation carries.
        assert!(gap <= 3.0 * se + 10.0 * tol + 2.0, "gap {gap} vs se {se}");
    }

    #[test]
    fn band_recurrence_matches_brute_force() {
        let (t, delta) = (2000.0, 0.5);
        let (h, a) = band_sums_pair(t, delta).unwrap();
        // Independent direct evaluation of every term, plain f64, no blocks;
        // also tracks Σ|term| so the comparison can use the designed drift
        // budget (phase and amplitude each drift at most BLOCK_DRIFT).
        let logt = t.ln();
        let brute = |k_lo: i64, k_hi: i64, x_lo_of: &dyn Fn(f64) -> f64| {
            let mut sh = Complex64::new(0.0, 0.0);
            let mut sa = Complex64::new(0.0, 0.0);
            let (mut mh, mut ma) = (0.0f64, 0.0f64);
            for k in k_lo..=k_hi {
                let kappa = k as f64 - delta;
                let x_lo = x_lo_of(kappa);
                let mut n = (x_lo - delta).floor() as i64 + 1;
                if n < 1 {
                    n = 1;
                }
                while (n as f64 + delta) < t {
                    let x = n as f64 + delta;
                    let phase = -t * (kappa / x - kappa * kappa / (2.0 * x * x));
                    let damp = (-0.5 * t * kappa * kappa / (x * x)).exp();
                    let amp = 1.0 / (x * (x + kappa)).sqrt();
                    sh += Complex64::from_polar(amp * damp, phase);
                    sa += Complex64::from_polar(amp * damp * damp, phase);
                    mh += amp * damp;
                    ma += amp * damp * damp;
                    n += 1;
                }
            }
            (sh, sa, mh, ma)
        };
        let x_mid = (t * logt).sqrt();
        let k1 = (2.0 * logt + delta).floor() as i64;
        let k2 = (2.0 * x_mid + delta).ceil() as i64 - 1;
        let (b1h, b1a, m1h, m1a) = brute(1, k1, &|_| x_mid);
        let (b2h, b2a, m2h, m2a) = brute(k1 + 1, k2, &|kappa| 0.5 * (t / logt).sqrt() * kappa);
        let cap = |mass: f64| 4.0 * BLOCK_DRIFT * mass + 1e-10 * (1.0 + mass);
        assert!((h.s1 - b1h).norm() < cap(m1h), "s1 half: {} vs {}", (h.s1 - b1h).norm(), cap(m1h));
        assert!((a.s1 - b1a).norm() < cap(m1a), "s1 printed: {}", (a.s1 - b1a).norm());
        assert!((h.s2 - b2h).norm() < cap(m2h), "s2 half: {} vs {}", (h.s2 - b2h).norm(), cap(m2h));
        assert!((a.s2 - b2a).norm() < cap(m2a), "s2 printed: {}", (a.s2 - b2a).norm());
    }

    #[test]
    fn band_sums_stay_within_fitted_ceilings() {
        let t = 1e4;
        let (h, a) = band_sums_pair(t, 1.0).unwrap();
        let (lt, llt) = (t.ln(), t.ln().ln());
        for rep in [h, a] {
            assert!(rep.s5.norm() <= 3.0 * lt.sqrt() * llt, "{}: |s5| = {}", rep.variant, rep.s5.norm());
            assert!(
                rep.s1.norm() + rep.s2.norm() <= 3.0 * llt,
                "{}: |s1|+|s2| = {}",
                rep.variant,
                rep.s1.norm() + rep.s2.norm()
            );
        }
    }

    #[test]
    fn band_sums_reject_bad_parameters() {
        assert!(band_sums(1e4, 0.0, DampingVariant::HalfSquare).is_err());
        assert!(band_sums(1e4, 1.5, DampingVariant::HalfSquare).is_err());
        assert!(band_sums(50.0, 1.0, DampingVariant::HalfSquare).is_err());
        assert!(band_sums(2e6, 1.0, DampingVariant::HalfSquare).is_err());
    }
}
