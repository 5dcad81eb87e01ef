//! Minimal double-double helpers for phase-critical work.
//!
//! Evaluating partial sums of n^{-s} at heights around 10^6–10^7 multiplies
//! log n by the height before reducing mod 2π; in plain f64 that rounding
//! alone costs ~1e-9 radians per term, which is visible against the 1e-10
//! accuracy target. The fix is standard: carry log n to ~32 digits as an
//! unevaluated (hi, lo) pair and reduce the product carefully. Only the
//! handful of routines needed for that live here.

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// ln 2 to double-double precision.
pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
/// 2π to double-double precision.
pub const TWO_PI: Dd = Dd { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // Requires |a| >= |b|.
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = (r.hi + r.lo) / (other.hi + other.lo);
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn scale(self, k: f64) -> Dd {
        let (p, e) = two_prod(self.hi, k);
        let (hi, lo) = quick_two_sum(p, e + self.lo * k);
        Dd { hi, lo }
    }
}

/// log(1 + x) for |x| <= 1/2 via the atanh form 2·atanh(x/(2+x)),
/// which converges geometrically with ratio < 1/36 for x <= 1/3.
fn ln1p(x: Dd) -> Dd {
    let z = x.div(x.add(Dd::from_f64(2.0)));
    let zz = z.mul(z);
    // sum z^{2k}/(2k+1), truncated when the term falls below 1e-35 relative.
    // Dividing by the exact small integer keeps full dd precision; scaling
    // by a rounded reciprocal would cost ~1e-19 absolute.
    let mut term = Dd::from_f64(1.0);
    let mut acc = Dd::from_f64(1.0);
    for k in 1..60 {
        term = term.mul(zz);
        let contrib = term.div(Dd::from_f64((2 * k + 1) as f64));
        acc = acc.add(contrib);
        if contrib.hi.abs() < 1e-35 * acc.hi.abs() {
            break;
        }
    }
    z.mul(acc).scale(2.0)
}

/// Table of log n in double-double for n = 0..=n_max (entry 0 unused).
///
/// Built incrementally: even n by exact halving, odd n from (n+1)/2 by
/// ln n = ln((n+1)/2) + ln 2 - log1p(1/n).
pub fn ln_table(n_max: usize) -> Vec<Dd> {
    let mut table = vec![Dd::default(); n_max + 1];
    if n_max >= 2 {
        table[2] = LN2;
    }
    for n in 3..=n_max {
        table[n] = if n % 2 == 0 {
            table[n / 2].add(LN2)
        } else {
            let inv_n = Dd::from_f64(1.0).div(Dd::from_f64(n as f64));
            table[(n + 1) / 2].add(LN2).sub(ln1p(inv_n))
        };
    }
    table
}

/// x·(hi + lo) reduced mod 2π into roughly [-π, π].
///
/// Assumes |x·hi| < 2^52 so the integer multiple of 2π is exact.
#[inline]
pub fn phase_mod_2pi(x: f64, l: Dd) -> f64 {
    let (p_hi, p_err) = two_prod(x, l.hi);
    let p_lo = p_err + x * l.lo;
    let m = (p_hi / TWO_PI.hi).round();
    let (e1, e1_err) = two_prod(m, TWO_PI.hi);
    // p_hi and e1 agree to within 2π, so the leading subtraction is exact.
    (p_hi - e1) - e1_err - m * TWO_PI.lo + p_lo
}
