//! Fourier partial sums at arbitrary times, their convergence diagnostics,
//! and the smoothly truncated sum `U*`.
//!
//! All sums run symmetrically over `0 < |k| <= K` in ascending `|k|`, pairing
//! `k` with `-k` before accumulation, with every phase `t k^n` reduced mod 1
//! exactly (rational times) or in double-double (real times).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classd::{fourier_coeff, PiecewisePeriodic};
use crate::dd::{cis_turns, frac_mul, CompensatedSum, DoubleDouble};
use crate::diophantine::Fraction;
use crate::error::{Error, Result};

/// Time argument of the series routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Time {
    Rational(Fraction),
    Real(DoubleDouble),
}

impl Time {
    pub fn real(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFinite(t));
        }
        Ok(Time::Real(DoubleDouble::from(t)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Time::Rational(f) => f.to_f64(),
            Time::Real(t) => t.to_f64(),
        }
    }

    pub fn to_dd(&self) -> DoubleDouble {
        match self {
            Time::Rational(f) => f.to_dd(),
            Time::Real(t) => *t,
        }
    }

    /// `t k^n mod 1`, in `[0, 1)`.
    pub fn phase(&self, k: i64, n: u32) -> f64 {
        match self {
            Time::Rational(f) => {
                let q = f.denom() as u128;
                let r = pow_mod(k.rem_euclid(q as i64) as u128, n, q);
                ((f.numer() as u128 * r) % q) as f64 / q as f64
            }
            Time::Real(t) => {
                let kn = int_pow(k, n);
                let f = (*t * kn).fract().to_f64();
                if f >= 1.0 {
                    0.0
                } else {
                    f
                }
            }
        }
    }
}

impl From<Fraction> for Time {
    fn from(f: Fraction) -> Self {
        Time::Rational(f)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Rational(r) => write!(f, "{r}"),
            Time::Real(t) => write!(f, "{}", t.to_f64()),
        }
    }
}

impl FromStr for Time {
    type Err = Error;

    /// `u/q` gives an exact rational time, anything else is read as a decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(Time::Rational(s.parse()?));
        }
        let t: f64 = s.parse().map_err(|e| Error::Parse(format!("time {s:?}: {e}")))?;
        Time::real(t)
    }
}

fn pow_mod(base: u128, exp: u32, m: u128) -> u128 {
    let mut acc = 1 % m;
    let mut b = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// `k^n` as a double-double, exact while it fits in 106 bits.
fn int_pow(k: i64, n: u32) -> DoubleDouble {
    match (k.unsigned_abs() as u128).checked_pow(n) {
        Some(p) if p < 1 << 106 => {
            let v = DoubleDouble::from_u128(p);
            if k < 0 && n % 2 == 1 {
                -v
            } else {
                v
            }
        }
        _ => DoubleDouble::from(k as f64).powi(n),
    }
}

/// Samples of a complex field on an x-grid at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub t: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn new(t: f64, xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: values.len() });
        }
        Ok(Self { t, xs, values })
    }

    /// `x_i = -1/2 + i/N` for `i = 0..N`.
    pub fn uniform_grid(size: usize) -> Vec<f64> {
        (0..size).map(|i| -0.5 + i as f64 / size as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Smooth partition `φ` with `φ = 1` on `[-1/2, 1/2]`, `φ = 0` outside
/// `[-2, 2]` and `φ(x) + φ(1/x) = 1` for `x > 0`.
///
/// On `1/2 < |x| < 2` it is `σ(1/2 - log|x| / log 4)` with the quintic
/// smoothstep `σ(u) = 6u^5 - 15u^4 + 10u^3`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SmoothCutoff;

impl SmoothCutoff {
    pub fn smoothstep(u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        u * u * u * (u * (6.0 * u - 15.0) + 10.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= 0.5 {
            1.0
        } else if a >= 2.0 {
            0.0
        } else {
            Self::smoothstep(0.5 - a.ln() / 4f64.ln())
        }
    }

    /// Largest `|x|` where `φ` can be nonzero.
    pub fn support(&self) -> f64 {
        2.0
    }
}

/// `S_K(t, x) = Σ_{0<|k|<=K} e(t k^n + x k) / k`.
pub fn partial_sum_s(t: &Time, x: f64, big_k: u64, n: u32) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for k in 1..=big_k as i64 {
        let xk = frac_mul(x, k);
        let plus = cis_turns(t.phase(k, n) + xk);
        let minus = cis_turns(t.phase(-k, n) - xk);
        acc.add((plus - minus) / k as f64);
    }
    acc.value()
}

/// Fourier coefficients `c_k` for `|k| <= K` as `(c_0, [(c_k, c_-k)])`.
fn coefficient_pairs(f: &PiecewisePeriodic, big_k: u64) -> (Complex64, Vec<(Complex64, Complex64)>) {
    let pairs = (1..=big_k as i64).into_par_iter().map(|k| (fourier_coeff(f, k), fourier_coeff(f, -k))).collect();
    (fourier_coeff(f, 0), pairs)
}

/// `c_k e(t k^n)` for `k = ±1..±K`, the x-independent part of every term.
fn evolved_pairs(
    f: &PiecewisePeriodic,
    t: &Time,
    big_k: u64,
    n: u32,
    weight: impl Fn(i64) -> f64 + Sync,
) -> (Complex64, Vec<(Complex64, Complex64)>) {
    let (c0, pairs) = coefficient_pairs(f, big_k);
    let evolved = pairs
        .into_par_iter()
        .enumerate()
        .map(|(i, (cp, cm))| {
            let k = i as i64 + 1;
            let w = weight(k);
            (cp * cis_turns(t.phase(k, n)) * w, cm * cis_turns(t.phase(-k, n)) * w)
        })
        .collect();
    (c0, evolved)
}

fn sum_at(c0: Complex64, pairs: &[(Complex64, Complex64)], x: f64) -> Complex64 {
    let mut acc = CompensatedSum::new();
    acc.add(c0);
    for (i, &(ap, am)) in pairs.iter().enumerate() {
        let e = cis_turns(frac_mul(x, i as i64 + 1));
        acc.add(ap * e + am * e.conj());
    }
    acc.value()
}

/// `U_K(t, x) = c_0 + Σ_{0<|k|<=K} c_k e(t k^n + x k)` for the data `f`.
pub fn solution_partial_sum(f: &PiecewisePeriodic, t: &Time, x: f64, big_k: u64, n: u32) -> Complex64 {
    let (c0, pairs) = evolved_pairs(f, t, big_k, n, |_| 1.0);
    sum_at(c0, &pairs, x)
}

/// [`solution_partial_sum`] at many points, sharing the x-independent work.
pub fn solution_partial_sum_grid(f: &PiecewisePeriodic, t: &Time, xs: &[f64], big_k: u64, n: u32) -> Vec<Complex64> {
    let (c0, pairs) = evolved_pairs(f, t, big_k, n, |_| 1.0);
    xs.par_iter().map(|&x| sum_at(c0, &pairs, x)).collect()
}

/// Number of x-samples used by [`cauchy_profile`].
pub const CAUCHY_SAMPLES: usize = 128;

/// For consecutive `K < K'` in `ks`, `max_x |S_K' - S_K|` over 128 points `x_j = (j + 1/2)/128`.
pub fn cauchy_profile(t: &Time, ks: &[u64], n: u32) -> Result<Vec<f64>> {
    if ks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("K values must be non-decreasing".into()));
    }
    let Some(&k_max) = ks.last() else {
        return Ok(Vec::new());
    };
    // x-independent parts e(t k^n)/k and e(t (-k)^n)/k
    let phases: Vec<(Complex64, Complex64)> = (1..=k_max as i64)
        .map(|k| (cis_turns(t.phase(k, n)) / k as f64, cis_turns(t.phase(-k, n)) / k as f64))
        .collect();
    let xs: Vec<f64> = (0..CAUCHY_SAMPLES).map(|j| (j as f64 + 0.5) / CAUCHY_SAMPLES as f64).collect();

    let per_x: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = CompensatedSum::new();
            let mut out = Vec::with_capacity(ks.len());
            let mut next = 0usize;
            let mut k = 0u64;
            while next < ks.len() {
                while k < ks[next] {
                    k += 1;
                    let (ap, am) = phases[k as usize - 1];
                    let e = cis_turns(frac_mul(x, k as i64));
                    acc.add(ap * e - am * e.conj());
                }
                out.push(acc.value());
                next += 1;
            }
            out
        })
        .collect();

    Ok((1..ks.len()).map(|i| per_x.iter().map(|s| (s[i] - s[i - 1]).norm()).fold(0.0, f64::max)).collect())
}

/// Midpoint of the admissible `α` window `(1/(n-Δ), 1/(n-1))` at `Δ = 0.4`.
pub fn default_alpha(n: u32) -> f64 {
    let n = n as f64;
    0.5 * (1.0 / (n - 0.4) + 1.0 / (n - 1.0))
}

/// `U*(t, x) = c_0 + Σ_{k≠0} φ(k t^α) c_k e(t k^n + x k)`, a finite sum over `|k| <= 2 t^-α`.
pub fn smoothed_solution_u_star(
    f: &PiecewisePeriodic,
    t: &Time,
    x: f64,
    n: u32,
    alpha: f64,
    cutoff: &SmoothCutoff,
) -> Result<Complex64> {
    Ok(smoothed_solution_u_star_grid(f, t, &[x], n, alpha, cutoff)?[0])
}

/// [`smoothed_solution_u_star`] at many points.
pub fn smoothed_solution_u_star_grid(
    f: &PiecewisePeriodic,
    t: &Time,
    xs: &[f64],
    n: u32,
    alpha: f64,
    cutoff: &SmoothCutoff,
) -> Result<Vec<Complex64>> {
    let tf = t.to_f64();
    if !(tf > 0.0) {
        return Err(Error::OutOfRange { value: tf, range: "(0, inf)" });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::OutOfRange { value: alpha, range: "(0, inf)" });
    }
    let scale = tf.powf(alpha);
    let big_k = (cutoff.support() / scale).floor() as u64;
    let (c0, pairs) = evolved_pairs(f, t, big_k, n, |k| cutoff.eval(k as f64 * scale));
    Ok(xs.par_iter().map(|&x| sum_at(c0, &pairs, x)).collect())
}
