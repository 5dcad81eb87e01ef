//! Adaptive Gauss–Kronrod quadrature for complex integrands.
//!
//! One engine serves three use sites: plain adaptive panels, an
//! oscillation-aware variant that refuses to let a panel span more than
//! about one cycle of a caller-described phase, and a tensor-product 2-D
//! version for the unit-square and lattice-cell integrals. All of them
//! refine the worst panel first from a heap, with insertion order breaking
//! ties so runs are deterministic.

use crate::error::{Error, Result};
use crate::sum::ComplexCompensated;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// 15-point Kronrod abscissae on [0, 1] side of [-1, 1] (symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
/// Kronrod weights matching XGK.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
/// Embedded 7-point Gauss weights (nodes XGK[1], XGK[3], XGK[5], center).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Absolute error target for the whole interval.
    pub tol: f64,
    /// Refinement budget; exceeding it is an error, not a silent result.
    pub max_panels: usize,
    /// Uniform initial subdivision (1 = start from the whole interval).
    pub initial: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-10, max_panels: 20_000, initial: 1 }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    /// Conservative absolute error estimate (sum of per-panel |K15-G7|).
    pub error: f64,
    pub panels: usize,
}

/// One evaluated panel.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on error; older panels first on exact ties.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fsum = f(c - x) + f(c + x);
        resk += WGK[i] * fsum;
        if i % 2 == 1 {
            resg += WG[i / 2] * fsum;
        }
    }
    (resk * h, (resk - resg).norm() * h.abs())
}

/// Adaptive integration of f over [a, b].
pub fn integrate(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult> {
    integrate_with_cap(&mut f, a, b, cfg, None::<fn(f64) -> f64>)
}

/// Adaptive integration where no panel may span more than about one cycle
/// of the supplied local frequency (cycles per unit length). Use for
/// integrands like g(x)·e^(2πi(f(x)-mx)) with freq = |f'(x) - m|.
pub fn integrate_oscillatory(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    freq: impl Fn(f64) -> f64,
    cfg: QuadConfig,
) -> Result<QuadResult> {
    integrate_with_cap(&mut f, a, b, cfg, Some(freq))
}

fn integrate_with_cap(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    cfg: QuadConfig,
    freq: Option<impl Fn(f64) -> f64>,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("quadrature needs finite endpoints"));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0 });
    }

    // A panel spanning more than one cycle of the phase can alias: the
    // 15-point rule sees a slow function and reports a tiny error. The cap
    // forces splits until sampling honesty is restored.
    let needs_split = |lo: f64, hi: f64| -> bool {
        match &freq {
            None => false,
            Some(fr) => {
                let w = hi - lo;
                let mut fmax: f64 = 0.0;
                for k in 0..5 {
                    fmax = fmax.max(fr(lo + w * (k as f64 + 0.5) / 5.0).abs());
                }
                w * fmax > 1.0
            }
        }
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let initial = cfg.initial.max(1);
    let mut pending: Vec<(f64, f64)> = (0..initial)
        .map(|i| {
            let w = (b - a) / initial as f64;
            (a + i as f64 * w, if i + 1 == initial { b } else { a + (i + 1) as f64 * w })
        })
        .collect();
    let mut panels = 0usize;

    while let Some((lo, hi)) = pending.pop() {
        if needs_split(lo, hi) && (hi - lo).abs() > 1e-14 * (b - a).abs() {
            let mid = 0.5 * (lo + hi);
            pending.push((lo, mid));
            pending.push((mid, hi));
            continue;
        }
        let (value, error) = gk15(f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, error, seq });
        seq += 1;
        panels += 1;
        if panels > cfg.max_panels {
            return Err(Error::QuadratureNonConvergence { achieved: f64::INFINITY, requested: cfg.tol });
        }
    }

    // Running total of panel error estimates, maintained incrementally and
    // refreshed from the heap before any convergence decision (the running
    // value only drifts by rounding, but refreshing keeps it honest).
    let mut err_total: f64 = heap.iter().map(|p| p.error).sum();

    while err_total > cfg.tol {
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        if panels + 2 > cfg.max_panels || (worst.b - worst.a).abs() < 4.0 * f64::EPSILON * worst.b.abs().max(1.0) {
            // Give up: put it back and report what we achieved.
            heap.push(worst);
            let achieved: f64 = heap.iter().map(|p| p.error).sum();
            if achieved > cfg.tol {
                return Err(Error::QuadratureNonConvergence { achieved, requested: cfg.tol });
            }
            break;
        }
        err_total -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(f, lo, hi);
            err_total += error;
            heap.push(Panel { a: lo, b: hi, value, error, seq });
            seq += 1;
            panels += 1;
        }
    }

    // Fixed-order reduction: sort by left endpoint, then compensated sum.
    let mut parts: Vec<Panel> = heap.into_vec();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let mut acc = ComplexCompensated::new();
    let mut err = 0.0;
    for p in &parts {
        acc.add(p.value);
        err += p.error;
    }
    Ok(QuadResult { value: acc.value(), error: err, panels })
}

/// Real-valued convenience wrapper.
pub fn integrate_real(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, cfg: QuadConfig) -> Result<(f64, f64)> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, cfg)?;
    Ok((r.value.re, r.error))
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    value: Complex64,
    error: f64,
    seq: u64,
}

impl PartialEq for Rect {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Rect {}
impl PartialOrd for Rect {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Rect {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gk15_2d(f: &mut impl FnMut(f64, f64) -> Complex64, r: (f64, f64, f64, f64)) -> (Complex64, f64) {
    let (ax, bx, ay, by) = r;
    let cx = 0.5 * (ax + bx);
    let hx = 0.5 * (bx - ax);
    let cy = 0.5 * (ay + by);
    let hy = 0.5 * (by - ay);

    // All 15 nodes and both weight sets per axis, as (node, wk, wg) with
    // wg = 0 for Kronrod-only nodes.
    let mut axis = [(0.0f64, 0.0f64, 0.0f64); 15];
    for i in 0..7 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        axis[i] = (-XGK[i], WGK[i], wg);
        axis[14 - i] = (XGK[i], WGK[i], wg);
    }
    axis[7] = (0.0, WGK[7], WG[3]);

    let mut resk = Complex64::new(0.0, 0.0);
    let mut resg = Complex64::new(0.0, 0.0);
    for &(xi, wkx, wgx) in &axis {
        let x = cx + hx * xi;
        for &(yi, wky, wgy) in &axis {
            let v = f(x, cy + hy * yi);
            resk += wkx * wky * v;
            if wgx != 0.0 && wgy != 0.0 {
                resg += wgx * wgy * v;
            }
        }
    }
    let scale = (hx * hy).abs();
    (resk * hx * hy, (resk - resg).norm() * scale)
}

/// Adaptive 2-D integration over the rectangle [ax,bx] × [ay,by].
pub fn integrate_2d(
    mut f: impl FnMut(f64, f64) -> Complex64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
    max_rects: usize,
) -> Result<QuadResult> {
    let mut heap: BinaryHeap<Rect> = BinaryHeap::new();
    let mut seq = 0u64;
    let (value, error) = gk15_2d(&mut f, (x_range.0, x_range.1, y_range.0, y_range.1));
    heap.push(Rect { ax: x_range.0, bx: x_range.1, ay: y_range.0, by: y_range.1, value, error, seq });
    let mut rects = 1usize;

    let mut err_total: f64 = heap.iter().map(|r| r.error).sum();

    while err_total > tol {
        let worst = heap.pop().expect("non-empty");
        let wx = worst.bx - worst.ax;
        let wy = worst.by - worst.ay;
        let degenerate = wx.abs() < 1e-13 * worst.bx.abs().max(1.0) && wy.abs() < 1e-13 * worst.by.abs().max(1.0);
        if rects + 2 > max_rects || degenerate {
            heap.push(worst);
            let achieved: f64 = heap.iter().map(|r| r.error).sum();
            if achieved > tol {
                return Err(Error::QuadratureNonConvergence { achieved, requested: tol });
            }
            break;
        }
        err_total -= worst.error;
        let children = if wx >= wy {
            let mx = 0.5 * (worst.ax + worst.bx);
            [(worst.ax, mx, worst.ay, worst.by), (mx, worst.bx, worst.ay, worst.by)]
        } else {
            let my = 0.5 * (worst.ay + worst.by);
            [(worst.ax, worst.bx, worst.ay, my), (worst.ax, worst.bx, my, worst.by)]
        };
        for r in children {
            let (value, error) = gk15_2d(&mut f, r);
            err_total += error;
            heap.push(Rect { ax: r.0, bx: r.1, ay: r.2, by: r.3, value, error, seq });
            seq += 1;
            rects += 1;
        }
    }

    let mut parts: Vec<Rect> = heap.into_vec();
    parts.sort_by(|p, q| {
        p.ax.total_cmp(&q.ax)
            .then(p.ay.total_cmp(&q.ay))
            .then(p.bx.total_cmp(&q.bx))
            .then(p.by.total_cmp(&q.by))
    });
    let mut acc = ComplexCompensated::new();
    let mut err = 0.0;
    for p in &parts {
        acc.add(p.value);
        err += p.error;
    }
    Ok(QuadResult { value: acc.value(), error: err, panels: rects })
}
