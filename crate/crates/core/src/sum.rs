//! Compensated (Neumaier) accumulation for real and complex values.
//!
//! Every long reduction in this crate runs through these accumulators in a
//! fixed order, which is what makes results independent of worker count.

use num_complex::Complex64;

/// Neumaier compensated accumulator.
///
/// Error is O(n·ε²) — effectively independent of length — where naive
/// left-to-right summation is O(n·ε).
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }

    pub fn sum_iter(values: impl IntoIterator<Item = f64>) -> f64 {
        let mut acc = Self::new();
        for v in values {
            acc.add(v);
        }
        acc.value()
    }
}

/// Component-wise compensated accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexCompensated {
    re: Compensated,
    im: Compensated,
}

impl ComplexCompensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn sum_iter(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
        let mut acc = Self::new();
        for z in values {
            acc.add(z);
        }
        acc.value()
    }
}
