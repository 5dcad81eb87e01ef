//! Principal-branch complex kernels with the stability tweaks the rest of
//! the crate depends on.
//!
//! The recurring object downstream is (1 + i·w)^(-t) for w = log(u/v) and t
//! up to 10^6 or so. Two things hurt in naive arithmetic: the real part of
//! log(1+iw) collapses to log(1) = 0 for small w, and exp of a large complex
//! product overflows silently. Both are handled here once so callers don't
//! have to think about it.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Exponent beyond which exp() overflows f64.
const EXP_OVERFLOW: f64 = 709.0;

/// Principal-branch log with arg in (-π, π].
///
/// The real part uses log1p on (|z|² - 1) when |z| is within a factor of 2
/// of the unit circle, where the naive form loses up to half the digits.
pub fn principal_log(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::domain("principal_log(0) undefined"));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain("principal_log of non-finite input"));
    }
    let norm_sq_m1 = (z.re - 1.0) * (z.re + 1.0) + z.im * z.im;
    let re = if norm_sq_m1.abs() < 3.0 {
        0.5 * norm_sq_m1.ln_1p()
    } else {
        0.5 * (z.re * z.re + z.im * z.im).ln()
    };
    Ok(Complex64::new(re, z.im.atan2(z.re)))
}

/// log(1 + i·w), accurate for every magnitude of w.
///
/// Real part ½·log1p(w²) is exact-to-rounding even at w = 1e-300, where
/// log(|1+iw|) evaluates to 0.
#[inline]
pub fn log_one_plus_iw(w: f64) -> Complex64 {
    Complex64::new(0.5 * (w * w).ln_1p(), w.atan())
}

/// base^exponent via exp(exponent · principal_log(base)).
///
/// Errors: zero base (domain), or |real part of the product| past the exp
/// range (overflow) — underflow quietly returns 0 as usual.
pub fn stable_pow(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    let log = principal_log(base)?;
    exp_checked(exponent * log)
}

/// (1 + i·w)^exponent for real exponent, on the stable log path.
#[inline]
pub fn pow_one_plus_iw(w: f64, exponent: f64) -> Result<Complex64> {
    let log = log_one_plus_iw(w);
    exp_checked(Complex64::new(exponent * log.re, exponent * log.im))
}

#[inline]
fn exp_checked(w: Complex64) -> Result<Complex64> {
    if w.re > EXP_OVERFLOW {
        return Err(Error::overflow(format!(
            "exp({:.3e} + {:.3e}i) exceeds f64 range",
            w.re, w.im
        )));
    }
    let r = w.re.exp();
    let (s, c) = w.im.sin_cos();
    Ok(Complex64::new(r * c, r * s))
}

/// Arguments of the ratio kernel (1 + i·log(u/v))^-(t+p).
#[derive(Debug, Clone, Copy)]
pub struct KernelArgs {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    /// Small non-negative exponent offset (0, 1 or 2 in practice).
    pub p: u32,
}

/// (1 + i·log(u/v))^-(t+p).
///
/// log(u/v) is computed as log u - log v rather than log of the quotient, so
/// u and v at opposite ends of the f64 range cannot push the ratio itself
/// out of range.
pub fn kernel(args: KernelArgs) -> Result<Complex64> {
    let KernelArgs { u, v, t, p } = args;
    if !(u > 0.0) || !(v > 0.0) {
        return Err(Error::domain(format!("kernel needs u, v > 0, got u={u}, v={v}")));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("kernel needs t >= 0, got t={t}")));
    }
    let w = if 0.5 < u / v && u / v < 2.0 {
        // Nearby arguments: (u-v)/v is exact enough and log1p keeps the
        // cancellation out of the logarithm.
        (u / v - 1.0).ln_1p()
    } else {
        u.ln() - v.ln()
    };
    pow_one_plus_iw(w, -(t + p as f64))
}

/// exp(-t·(z - z²/2)), the two-term Taylor surrogate for (1+z)^-t.
pub fn taylor_kernel(z: Complex64, t: f64) -> Result<Complex64> {
    if z.norm_sqr() >= 1.0 {
        return Err(Error::domain(format!("taylor_kernel needs |z| < 1, got |z|={}", z.norm())));
    }
    exp_checked(-t * (z - 0.5 * z * z))
}

/// Relative deviation |(1+z)^-t - taylor_kernel(z,t)| / |(1+z)^-t|.
///
/// The deviation is O(t·|z|³) and this is what calibrates how far the
/// Gaussian surrogate can be trusted off the diagonal.
pub fn taylor_kernel_deviation(z: Complex64, t: f64) -> Result<f64> {
    let exact = stable_pow(Complex64::new(1.0 + z.re, z.im), Complex64::new(-t, 0.0))?;
    let approx = taylor_kernel(z, t)?;
    Ok((exact - approx).norm() / exact.norm())
}
