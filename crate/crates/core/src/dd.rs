//! Double-double arithmetic and compensated summation.
//!
//! A [`DoubleDouble`] is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving about 106 bits of significand. It is used wherever a phase such as
//! `t k^n` has to be reduced modulo 1 after the integer part has grown far
//! beyond `2^53`, and to hold irrational times whose continued fractions are
//! needed to denominators around `10^12`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from two parts whose sum is the intended number.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Exact for `|x| < 2^106`; above that the low bits are rounded.
    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // `hi` rounds to nearest, so the residual fits in an i128.
        let hi_int = hi as u128;
        let rest = if hi_int >= x { -((hi_int - x) as f64) } else { (x - hi_int) as f64 };
        Self::new(hi, rest)
    }

    pub fn from_i128(x: i128) -> Self {
        if x < 0 {
            -Self::from_u128(x.unsigned_abs())
        } else {
            Self::from_u128(x as u128)
        }
    }

    /// `num / den` correctly rounded to double-double precision.
    pub fn from_ratio(num: i128, den: i128) -> Self {
        Self::from_i128(num) / Self::from_i128(den)
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            // hi is already an integer; the fractional information is in lo.
            let lo = self.lo.floor();
            let (hi, lo) = quick_two_sum(hi, lo);
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(self) -> Self {
        let f = self - self.floor();
        if f >= Self::ONE {
            f - Self::ONE
        } else if f < Self::ZERO {
            // only reachable through rounding of the low word
            Self::ZERO
        } else {
            f
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::new(f64::NAN, 0.0) };
        }
        // One Newton step on the f64 estimate doubles the accurate bits.
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = (self - Self { hi: p, lo: e }).to_f64();
        Self::new(x, residual / (2.0 * x))
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s0, e0) = two_sum(self.hi, rhs.hi);
        let (s1, e1) = two_sum(self.lo, rhs.lo);
        let (s0, e0) = quick_two_sum(s0, e0 + s1);
        let (hi, lo) = quick_two_sum(s0, e0 + e1);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = self.hi.mul_add(rhs.lo, e);
        let e = self.lo.mul_add(rhs.hi, e);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // Long division with three quotient digits.
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from(q3)
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self + Self::from(rhs)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        self - Self::from(rhs)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Self::from(rhs)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

/// Fractional part of `x * k` for an integer `k`, using an exact product.
/// The result is in `[0, 1)`; a value that rounds up to 1 is returned as 0.
#[inline]
pub fn frac_mul(x: f64, k: i64) -> f64 {
    let (p, e) = two_prod(x, k as f64);
    let f = DoubleDouble::new(p, e).fract().to_f64();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `exp(2 pi i phase)` for a phase already reduced to a small range.
#[inline]
pub fn cis_turns(phase: f64) -> Complex64 {
    let centered = phase - phase.round();
    let (s, c) = (std::f64::consts::TAU * centered).sin_cos();
    Complex64::new(c, s)
}

/// Neumaier-compensated sum of complex terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        let (re, ce) = neumaier(self.sum.re, x.re);
        let (im, ci) = neumaier(self.sum.im, x.im);
        self.sum = Complex64::new(re, im);
        self.comp += Complex64::new(ce, ci);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, c)
}

impl std::iter::FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
