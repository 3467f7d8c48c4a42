//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant digits. Used where alternating series cancel
//! many digits (power Mittag-Leffler kernels at large negative arguments, the
//! operator series form, closed-form derivative series).

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Largest magnitude that can be split without overflow.
const SPLIT_LIMIT: f64 = 6.696_928_794_914_17e299;

#[inline]
fn split(a: f64) -> (f64, f64) {
    if a.abs() > SPLIT_LIMIT {
        let s = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * s;
        let hi = t - (t - s);
        let lo = s - hi;
        return (hi * 268_435_456.0, lo * 268_435_456.0);
    }
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

pub const LN2: Dd = Dd::new(core::f64::consts::LN_2, 2.3190468138462996e-17);
pub const HALF_LN_2PI: Dd = Dd::new(0.9189385332046728, -3.8782941580672414e-17);

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    /// `self * 2^k`, exact barring over/underflow.
    pub fn ldexp(self, k: i32) -> Self {
        Dd {
            hi: libm::scalbn(self.hi, k),
            lo: libm::scalbn(self.lo, k),
        }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Dd::ONE;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.8 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        // x = k ln2 + r, |r| <= ln2/2, then exp(r) = exp(r / 2^10)^(2^10).
        let k = libm::round(self.hi / LN2.hi);
        let r = self - LN2.mul_f64(k);
        let s = r.ldexp(-10);
        // Taylor series of exp(s) - 1; |s| < 3.4e-4 so 10 terms reach ~1e-40.
        let mut term = s;
        let mut sum = s;
        for i in 2..=10 {
            term = term * s / Dd::new(i as f64, 0.0);
            sum = sum + term;
        }
        // (1 + e)^2 - 1 = 2e + e^2 keeps the small quantity separate.
        for _ in 0..10 {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN, 0.0);
        }
        // One Newton step on exp(y) = x doubles the accuracy of the f64 seed.
        let y = Dd::new(libm::log(self.hi), 0.0);
        y + self * (-y).exp() - Dd::ONE
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Compensated accumulator for long f64 sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct DdSum(pub Dd);

impl DdSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.0 = self.0.add_f64(x);
    }

    #[inline]
    pub fn add_dd(&mut self, x: Dd) {
        self.0 = self.0 + x;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0.to_f64()
    }
}
