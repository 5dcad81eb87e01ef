//! The acceptance gate: ten numbered criteria, each a self-contained check
//! with its stated tolerance, returning a deterministic pass/fail line.
//!
//! Wall-clock budgets are part of the timed criteria, but measured times are
//! never put into the line itself — reruns of a passing suite must be
//! byte-identical, so timings go to standard error at the call site.

use std::time::{Duration, Instant};

use zeta_sampler::decomposition::{
    band_sums_pair, compute_a, diagonal_averaged_sum, diagonal_point_sum,
    mc_second_moment_about_one, point_term, CrossTerm,
};
use zeta_sampler::gamma::{char_fn, empirical_char_fn, sample_batch, GammaParams};
use zeta_sampler::moment::{estimate_moments, residual_analysis, sweep};
use zeta_sampler::oscillatory::{check_case, corpus};
use zeta_sampler::sum::{Compensated, ComplexCompensated};
use zeta_sampler::zeta::{
    expected_zeta, zeta_em, zeta_integral_repr, EvalConfig, ZetaArgument,
};
use zeta_sampler::{Complex64, Error, Result};

pub const COUNT: usize = 10;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    /// Deterministic summary of what was measured against what.
    pub detail: String,
    pub budget_secs: Option<f64>,
    pub elapsed: Duration,
}

pub fn render_line(o: &CriterionOutcome) -> String {
    format!("{} {:>2} {}: {}", if o.pass { "ok  " } else { "FAIL" }, o.index, o.name, o.detail)
}

/// Run one criterion. `quick` trims the largest heights from the two
/// long-running grids; tolerances never change. Errors surface as failures,
/// not panics, so a broken criterion still yields its line.
pub fn run_criterion(index: usize, quick: bool, seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let (name, budget_secs, result) = match index {
        1 => ("characteristic-function law", Some(10.0), char_fn_law(seed)),
        2 => ("sampler moments", None, sampler_moments(seed)),
        3 => ("zeta cross-validation", Some(60.0), zeta_cross_validation()),
        4 => ("first moment near one", None, first_moment_near_one(seed)),
        5 => ("second-moment growth", Some(300.0), second_moment_growth(quick, seed)),
        6 => ("decomposition identity", None, decomposition_identity(seed)),
        7 => ("diagonal sums", None, diagonal_sums()),
        8 => ("van der Corput corpus", Some(120.0), vdc_corpus()),
        9 => ("band sums", None, band_sums_grid(quick)),
        10 => ("reproducibility", None, reproducibility(seed)),
        _ => panic!("criterion index must lie in 1..={COUNT}, got {index}"),
    };
    let elapsed = started.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget_secs {
        if elapsed.as_secs_f64() > b {
            pass = false;
            detail.push_str(&format!("; runtime over the {b:.0} s budget"));
        }
    }
    CriterionOutcome { index, name, pass, detail, budget_secs, elapsed }
}

pub fn run_all(quick: bool, seed: u64) -> Vec<CriterionOutcome> {
    (1..=COUNT).map(|i| run_criterion(i, quick, seed)).collect()
}

/// Empirical characteristic function of 10^5 draws vs (1 − iu)^{−t} on
/// u ∈ {−2,−1,1,2}, t ∈ {1,10,100}; allowed 5/√N.
fn char_fn_law(seed: u64) -> Result<(bool, String)> {
    let n = 100_000;
    let allowed = 5.0 / (n as f64).sqrt();
    let mut worst = 0.0_f64;
    for t in [1.0, 10.0, 100.0] {
        let params = GammaParams::new(t)?;
        let batch = sample_batch(params, n, seed)?;
        for u in [-2.0, -1.0, 1.0, 2.0] {
            let dev = (empirical_char_fn(&batch, u)? - char_fn(u, params)?).norm();
            worst = worst.max(dev);
        }
    }
    Ok((worst <= allowed, format!("max |empirical - exact| = {worst:.3e} (allowed {allowed:.3e})")))
}

/// Sample mean and variance of 10^6 draws at t = 100, each within five
/// standard deviations of its estimator.
fn sampler_moments(seed: u64) -> Result<(bool, String)> {
    let t = 100.0;
    let n = 1_000_000;
    let batch = sample_batch(GammaParams::new(t)?, n, seed)?;
    let nf = n as f64;
    let mut acc = Compensated::new();
    for &x in &batch.values {
        acc.add(x);
    }
    let mean = acc.value() / nf;
    let mut sq = Compensated::new();
    for &x in &batch.values {
        sq.add((x - mean) * (x - mean));
    }
    let var = sq.value() / (nf - 1.0);
    let mean_tol = 5.0 * (t / nf).sqrt();
    let var_tol = 5.0 * t * (3.0 / nf).sqrt();
    let pass = (mean - t).abs() <= mean_tol && (var - t).abs() <= var_tol;
    Ok((
        pass,
        format!(
            "|mean - t| = {:.3e} (allowed {:.3e}), |variance - t| = {:.3e} (allowed {:.3e})",
            (mean - t).abs(),
            mean_tol,
            (var - t).abs(),
            var_tol
        ),
    ))
}

/// The two unrelated continuations agree to 1e-8 on a 12-point grid around
/// the critical strip, and at s = 2 the main route hits pi^2/6 to 1e-10.
fn zeta_cross_validation() -> Result<(bool, String)> {
    let cfg = EvalConfig::default();
    let mut worst = 0.0_f64;
    for sigma in [0.3, 0.5, 0.7] {
        for t in [0.0, 1.0, 10.0, 30.0] {
            let arg = ZetaArgument::new(sigma, t)?;
            let em = zeta_em(arg, &cfg)?;
            let (ir, _) = zeta_integral_repr(arg, &cfg)?;
            worst = worst.max((em - ir).norm());
        }
    }
    let basel = std::f64::consts::PI.powi(2) / 6.0;
    let basel_dev = (zeta_em(ZetaArgument::new(2.0, 0.0)?, &cfg)? - basel).norm();
    let pass = worst <= 1e-8 && basel_dev <= 1e-10;
    Ok((
        pass,
        format!("max cross-method gap = {worst:.3e} (allowed 1e-8), zeta(2) off by {basel_dev:.3e} (allowed 1e-10)"),
    ))
}

/// E zeta(1/2 + iX_t): within 1e-3 of 1 at t = 100, improving over
/// t ∈ {50,100,200,400}, and the Monte Carlo route within 3 standard errors
/// of 1 at t = 200. The true deviation drops below what the quadrature can
/// resolve past t ~ 150 (it is already 5e-11 at t = 100), so "improving" is
/// asserted within the evaluations' own reported error estimates.
fn first_moment_near_one(seed: u64) -> Result<(bool, String)> {
    let cfg = EvalConfig::default();
    let mut prev = f64::INFINITY;
    let mut prev_err = 0.0;
    let mut monotone = true;
    let mut dev_at_100 = f64::NAN;
    for t in [50.0, 100.0, 200.0, 400.0] {
        let (value, err) = expected_zeta(t, &cfg)?;
        let dev = (value - 1.0).norm();
        if t == 100.0 {
            dev_at_100 = dev;
        }
        monotone &= dev <= prev + prev_err + err;
        prev = dev;
        prev_err = err;
    }
    let m = estimate_moments(200.0, 10_000, seed)?;
    let mc_dev = (m.first_moment - 1.0).norm();
    let pass = dev_at_100 <= 1e-3 && monotone && mc_dev <= 3.0 * m.se_first;
    Ok((
        pass,
        format!(
            "|E - 1| = {:.3e} at t = 100 (allowed 1e-3), decreasing {}, MC gap {:.3e} <= 3 se = {:.3e}",
            dev_at_100,
            if monotone { "yes" } else { "NO" },
            mc_dev,
            3.0 * m.se_first
        ),
    ))
}

/// Sweep of the second moment against log t: standard errors <= 0.2, the
/// fitted residual constant <= 3 against the sqrt(log t)·log log t band,
/// and residual/log t falling across the grid (2 se slack per step).
fn second_moment_growth(quick: bool, seed: u64) -> Result<(bool, String)> {
    let ts: &[f64] = if quick { &[1e3, 1e4, 1e5] } else { &[1e3, 1e4, 1e5, 1e6] };
    let rows = sweep(ts, 60_000, seed)?;
    let max_se = rows.iter().map(|r| r.se_second).fold(0.0_f64, f64::max);
    let analysis = residual_analysis(&rows)?;
    let mut trend_ok = true;
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let slack = 2.0 * (a.se_second / a.log_t + b.se_second / b.log_t);
        trend_ok &= b.residual / b.log_t <= a.residual / a.log_t + slack;
    }
    let pass = max_se <= 0.2 && analysis.pass && trend_ok;
    Ok((
        pass,
        format!(
            "c_fit = {:.2} (allowed 3), max se = {:.3} (allowed 0.2), residual/log t falling: {}",
            analysis.c_fit,
            max_se,
            if trend_ok { "yes" } else { "NO" }
        ),
    ))
}

/// A1 − 2 Re A2 + A3 vs the Monte Carlo centered second moment at
/// t ∈ {20, 50}, within 3 se + a quadrature budget + an explicit +2
/// allowance; the two A2 quadratures agree to 2 tol at t = 50.
fn decomposition_identity(seed: u64) -> Result<(bool, String)> {
    let tol = 1e-6;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut a2_closed_at_50 = Complex64::new(0.0, 0.0);
    for t in [20.0, 50.0] {
        let a1 = compute_a(t, CrossTerm::A1, tol)?;
        let a2 = compute_a(t, CrossTerm::A2Closed, tol)?;
        let a3 = compute_a(t, CrossTerm::A3, tol)?;
        if t == 50.0 {
            a2_closed_at_50 = a2;
        }
        let combined = a1.re - 2.0 * a2.re + a3.re;
        let (mc, se) = mc_second_moment_about_one(t, 4_000, seed)?;
        let gap = (combined - mc).abs();
        let allowed = 3.0 * se + 10.0 * tol + 2.0;
        pass &= gap <= allowed;
        parts.push(format!("t = {t}: gap {gap:.3} (allowed {allowed:.3})"));
    }
    let cross = (compute_a(50.0, CrossTerm::A2Direct, tol)? - a2_closed_at_50).norm();
    pass &= cross <= 2.0 * tol;
    parts.push(format!("A2 route gap {:.3e} (allowed {:.3e})", cross, 2.0 * tol));
    Ok((pass, parts.join(", ")))
}

/// The diagonal point terms collapse to the harmonic sum exactly (1e-12 at
/// t = 100), and point-minus-averaged diagonals stay within 3 of log t.
fn diagonal_sums() -> Result<(bool, String)> {
    let t = 100.0;
    let mut acc = ComplexCompensated::new();
    for n in 1..=(t as u64) {
        acc.add(point_term(t, n, n)?);
    }
    let f_sum = acc.value();
    let harmonic = diagonal_point_sum(t);
    let id_gap = (f_sum - harmonic).norm();
    let mut worst_gap = 0.0_f64;
    for t in [1e3, 1e4, 1e5] {
        let g = diagonal_averaged_sum(t)?;
        let gap = (Complex64::new(diagonal_point_sum(t) - t.ln(), 0.0) - g).norm();
        worst_gap = worst_gap.max(gap);
    }
    let pass = id_gap <= 1e-12 && worst_gap <= 3.0;
    Ok((
        pass,
        format!("harmonic identity gap = {id_gap:.3e} (allowed 1e-12), max |F - G - log t| = {worst_gap:.2} (allowed 3)"),
    ))
}

/// Every corpus case: transform within 10x its stated budget of the direct
/// sum, over at least 20 cases.
fn vdc_corpus() -> Result<(bool, String)> {
    let cases = corpus()?;
    let mut worst = 0.0_f64;
    let mut worst_label = String::new();
    for case in &cases {
        let check = check_case(case)?;
        if check.ratio > worst {
            worst = check.ratio;
            worst_label = check.label.clone();
        }
    }
    let pass = cases.len() >= 20 && worst <= 10.0;
    Ok((
        pass,
        format!("{} cases (need >= 20), worst deviation/budget = {:.2} (allowed 10) at {}", cases.len(), worst, worst_label),
    ))
}

/// |S5| <= 3 sqrt(log t) log log t and |S1| + |S2| <= 3 log log t over the
/// full (t, delta, variant) grid.
fn band_sums_grid(quick: bool) -> Result<(bool, String)> {
    let ts: &[f64] = if quick { &[1e4, 1e5] } else { &[1e4, 1e5, 1e6] };
    let mut frac5 = 0.0_f64;
    let mut frac12 = 0.0_f64;
    for &t in ts {
        let allow5 = 3.0 * t.ln().sqrt() * t.ln().ln();
        let allow12 = 3.0 * t.ln().ln();
        for delta in [0.25, 0.5, 1.0] {
            let (half_square, as_printed) = band_sums_pair(t, delta)?;
            for r in [half_square, as_printed] {
                frac5 = frac5.max(r.s5.norm() / allow5);
                frac12 = frac12.max((r.s1.norm() + r.s2.norm()) / allow12);
            }
        }
    }
    let pass = frac5 <= 1.0 && frac12 <= 1.0;
    Ok((
        pass,
        format!("max |S5|/bound = {frac5:.2}, max (|S1|+|S2|)/bound = {frac12:.2} (each allowed 1)"),
    ))
}

/// The moment pipeline serialized under 1-thread and 4-thread pools (twice)
/// is byte-identical.
fn reproducibility(seed: u64) -> Result<(bool, String)> {
    let render = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
        pool.install(|| {
            let m = estimate_moments(500.0, 20_000, seed)?;
            Ok(serde_json::to_string(&m).expect("moment report serializes"))
        })
    };
    let one = render(1)?;
    let four = render(4)?;
    let again = render(4)?;
    let pass = one == four && four == again;
    Ok((
        pass,
        format!(
            "serialized moment report identical across pool sizes 1 and 4: {}",
            if pass { "yes" } else { "NO" }
        ),
    ))
}
