//! Gamma(t, 1) sampling and its exact transform identities.
//!
//! The process X_t had better be sampled correctly: every Monte Carlo check
//! downstream leans on it. Three independent handles make bugs loud:
//! the density, the characteristic function E e^{iuX} = (1-iu)^{-t}, and the
//! power-moment E u^{-iX} = (1+i·log u)^{-t}. The sampler itself is the
//! Marsaglia–Tsang squeeze, one counter-seeded stream per sample.

use crate::complex::pow_one_plus_iw;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::special::ln_gamma;
use crate::sum::ComplexCompensated;
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    /// Shape = time parameter of the process; rate is fixed at 1.
    pub t: f64,
}

impl GammaParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("gamma shape must be positive and finite, got {t}")));
        }
        Ok(GammaParams { t })
    }
}

/// A reproducible batch of draws: (t, seed, count) fixes every bit.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub t: f64,
    pub seed: u64,
    pub values: Vec<f64>,
}

/// Density of Gamma(t, 1): x^{t-1} e^{-x} / Γ(t) for x > 0, else 0.
///
/// Evaluated in log space so t = 10^4 and x near 0 don't overflow anything.
pub fn gamma_density(x: f64, params: GammaParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((params.t - 1.0) * x.ln() - x - ln_gamma(params.t)).exp()
}

/// One draw with shape >= 1 (Marsaglia–Tsang).
fn draw_shape_ge_1(stream: &mut Stream, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = stream.normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = stream.uniform();
        let x2 = x * x;
        // Cheap squeeze accepts ~98% of proposals without a log.
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

fn draw(stream: &mut Stream, t: f64) -> f64 {
    if t >= 1.0 {
        draw_shape_ge_1(stream, t)
    } else {
        // Shape boost: X_t = X_{t+1} · U^{1/t}.
        let g = draw_shape_ge_1(stream, t + 1.0);
        g * stream.uniform().powf(1.0 / t)
    }
}

/// Draw `count` independent samples. Sample j comes entirely from the
/// stream keyed by (seed, j), so the result is identical no matter how the
/// work is scheduled.
pub fn sample_batch(params: GammaParams, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::EmptyBatch);
    }
    let t = params.t;
    let values: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|j| {
            let mut stream = Stream::for_index(seed, j);
            draw(&mut stream, t)
        })
        .collect();
    Ok(SampleBatch { t, seed, values })
}

/// E e^{iuX_t} = (1 - iu)^{-t}, exact for all real u.
pub fn char_fn(u: f64, params: GammaParams) -> Result<Complex64> {
    pow_one_plus_iw(-u, -params.t)
}

/// Empirical characteristic function of a batch at u.
pub fn empirical_char_fn(batch: &SampleBatch, u: f64) -> Result<Complex64> {
    if batch.values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut acc = ComplexCompensated::new();
    for &x in &batch.values {
        acc.add(Complex64::cis(u * x));
    }
    Ok(acc.value() / batch.values.len() as f64)
}

/// E u^{-iX_t} = (1 + i·log u)^{-t} for u > 0.
///
/// This is char_fn evaluated at -log u; the point of having it named is that
/// the zeta moment calculations use exactly this shape.
pub fn log_moment_fn(u: f64, params: GammaParams) -> Result<Complex64> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("log_moment_fn needs u > 0, got {u}")));
    }
    pow_one_plus_iw(u.ln(), -params.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_real, QuadConfig};
    use approx::assert_relative_eq;

    fn batch(t: f64, n: usize, seed: u64) -> SampleBatch {
        sample_batch(GammaParams::new(t).unwrap(), n, seed).unwrap()
    }

    #[test]
    fn density_at_shape_one_is_exponential() {
        let p = GammaParams::new(1.0).unwrap();
        for &x in &[0.1, 1.0, 5.0, 30.0] {
            assert_relative_eq!(gamma_density(x, p), (-x).exp(), max_relative = 1e-12);
        }
        assert_eq!(gamma_density(0.0, p), 0.0);
        assert_eq!(gamma_density(-3.0, p), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        for &t in &[0.5f64, 1.0, 10.0, 100.0] {
            let p = GammaParams::new(t).unwrap();
            // Integrable endpoint spike at 0 for t < 1: substitute x = w^2
            // there so the integrand is bounded.
            let (head, _) = if t < 1.0 {
                integrate_real(|w| 2.0 * w * gamma_density(w * w, p), 0.0, 1.0, QuadConfig::with_tol(1e-11)).unwrap()
            } else {
                integrate_real(|x| gamma_density(x, p), 0.0, 1.0, QuadConfig::with_tol(1e-11)).unwrap()
            };
            let hi = t + 60.0 * t.sqrt().max(1.0);
            let (tail, _) = integrate_real(|x| gamma_density(x, p), 1.0, hi, QuadConfig::with_tol(1e-11)).unwrap();
            assert!((head + tail - 1.0).abs() < 1e-8, "t={t}: mass {}", head + tail);
        }
    }

    #[test]
    fn empty_batch_is_an_error() {
        assert!(matches!(sample_batch(GammaParams::new(1.0).unwrap(), 0, 1), Err(Error::EmptyBatch)));
    }

    #[test]
    fn batches_are_reproducible_and_positive() {
        let a = batch(2.5, 10_000, 7);
        let b = batch(2.5, 10_000, 7);
        assert_eq!(a.values, b.values);
        assert!(a.values.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sample_moments_match_shape_100() {
        let n = 1_000_000;
        let b = batch(100.0, n, 42);
        let nf = n as f64;
        let mean = crate::sum::Compensated::sum_iter(b.values.iter().copied()) / nf;
        let var = crate::sum::Compensated::sum_iter(b.values.iter().map(|&x| (x - mean) * (x - mean))) / (nf - 1.0);
        assert!((mean - 100.0).abs() <= 5.0 * (100.0 / nf).sqrt(), "mean {mean}");
        assert!((var - 100.0).abs() <= 5.0 * 100.0 * (3.0 / nf).sqrt(), "var {var}");
    }

    #[test]
    fn small_shape_boost_matches_density_mass() {
        // P(X ≤ 1) for t = 0.5 is erf(1)... actually Γ(0.5) regularized:
        // P = γ(0.5, 1)/Γ(0.5) = erf(1) = 0.842700792949715.
        let b = batch(0.5, 200_000, 11);
        let frac = b.values.iter().filter(|&&x| x <= 1.0).count() as f64 / b.values.len() as f64;
        let se = (0.8427 * (1.0 - 0.8427) / 200_000.0f64).sqrt();
        assert!((frac - 0.842700792949715).abs() < 5.0 * se, "frac {frac}");
    }

    #[test]
    fn char_fn_at_zero_is_exactly_one() {
        let p = GammaParams::new(37.5).unwrap();
        let c = char_fn(0.0, p).unwrap();
        assert_eq!(c, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn char_fn_modulus_is_closed_form() {
        let p = GammaParams::new(12.0).unwrap();
        for &u in &[-2.0, -0.5, 0.3, 1.0, 2.0] {
            let c = char_fn(u, p).unwrap();
            let expect = (1.0 + u * u).powf(-6.0);
            assert_relative_eq!(c.norm(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn empirical_char_fn_at_zero_is_exactly_one() {
        let b = batch(3.0, 50_000, 5);
        let e = empirical_char_fn(&b, 0.0).unwrap();
        assert_eq!(e, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn empirical_char_fn_converges_to_the_law() {
        // max over the u-grid of |ecf - cf| ≤ 5/sqrt(N).
        let n = 100_000;
        for &t in &[1.0f64, 10.0, 100.0] {
            let p = GammaParams::new(t).unwrap();
            let b = batch(t, n, 42);
            for &u in &[-2.0f64, -1.0, 1.0, 2.0] {
                let err = (empirical_char_fn(&b, u).unwrap() - char_fn(u, p).unwrap()).norm();
                assert!(err <= 5.0 / (n as f64).sqrt(), "t={t} u={u}: err {err:.3e}");
            }
        }
    }

    #[test]
    fn empirical_char_fn_error_halves_when_n_quadruples() {
        // sup-norm error over a u-grid, N vs 4N, ratio within a factor 2 of 1/2.
        let t = 4.0;
        let p = GammaParams::new(t).unwrap();
        let sup_err = |n: usize| {
            let b = batch(t, n, 1234);
            let mut sup: f64 = 0.0;
            for k in -12..=12 {
                let u = k as f64 / 4.0;
                sup = sup.max((empirical_char_fn(&b, u).unwrap() - char_fn(u, p).unwrap()).norm());
            }
            sup
        };
        let e1 = sup_err(40_000);
        let e4 = sup_err(160_000);
        let ratio = e4 / e1;
        assert!(ratio > 0.25 / 2.0 && ratio < 0.5 * 2.0, "ratio {ratio}");
    }

    #[test]
    fn log_moment_fn_is_char_fn_at_minus_log_u() {
        let p = GammaParams::new(9.0).unwrap();
        for &u in &[0.1, 0.5, 1.0, 2.0, 7.0] {
            let a = log_moment_fn(u, p).unwrap();
            let b = char_fn(-u.ln(), p).unwrap();
            assert_eq!(a, b);
        }
        assert!(log_moment_fn(0.0, p).is_err());
        assert!(log_moment_fn(-1.0, p).is_err());
    }

    #[test]
    fn log_moment_fn_matches_monte_carlo() {
        let t = 5.0;
        let p = GammaParams::new(t).unwrap();
        let b = batch(t, 200_000, 99);
        for &u in &[0.5f64, 2.0] {
            let mc = empirical_char_fn(&b, -u.ln()).unwrap();
            let exact = log_moment_fn(u, p).unwrap();
            assert!((mc - exact).norm() < 5.0 / (200_000f64).sqrt());
        }
    }

    #[test]
    fn sum_of_gammas_is_gamma_by_two_sample_ks() {
        // X ~ Γ(0.7), Y ~ Γ(1.8) independent; X+Y vs direct Γ(2.5) draws.
        // Two-sample KS statistic must sit below the 1% critical value
        // 1.628·sqrt(2/n) for n = m = 10^4.
        let n = 10_000;
        let a = batch(0.7, n, 21);
        let b = batch(1.8, n, 22);
        let mut sums: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        let mut direct = batch(2.5, n, 23).values;
        sums.sort_by(f64::total_cmp);
        direct.sort_by(f64::total_cmp);

        // Two-sample KS: max |F1 - F2| over the merged order.
        let (mut i, mut j) = (0usize, 0usize);
        let mut ks: f64 = 0.0;
        while i < n && j < n {
            if sums[i] <= direct[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        let critical = 1.628 * (2.0 / n as f64).sqrt();
        assert!(ks < critical, "KS {ks:.4} >= critical {critical:.4}");
    }
}
