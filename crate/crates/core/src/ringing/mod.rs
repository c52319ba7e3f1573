//! Limiting profiles of the solution near an initial jump.
//!
//! Near `x = ±γ` and for small `t`, the solution in the variable
//! `x = ±γ + s t^{1/n}` tends to a fixed profile of `s`:
//!
//! * even `n`: `1/2 ∓ (1/2π) ∫ e(yⁿ) sin(2πsy) dy/y`, complex-valued;
//! * odd `n`:  `1/2 ∓ (1/2π) ∫ sin 2π(yⁿ + sy) dy/y`, real-valued.
//!
//! Integrals over the real line are folded onto `[0, ∞)` (both integrands
//! are even in `y`), integrated on `[0, Y]` with panels no wider than a
//! fixed fraction of the local oscillation period, and completed by
//! rotating the tail `∫_Y^∞ e(yⁿ + σy) dy/y` onto the ray
//! `Y + r e^{iπ/(2n)}`, along which it decays faster than exponentially.

pub mod fresnel;
pub mod quad;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::classd::{indicator, ProblemConfig};
use crate::error::{Error, Result};
use crate::expsum::IntPoly;
use crate::rational::{solve_rational, RationalSolution};
use crate::series::{default_alpha, solution_partial_sum, Time};
use quad::{adaptive, Estimate};

/// Which jump the profile describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Near `x = +γ`.
    Plus,
    /// Near `x = -γ`.
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Side::Plus),
            -1 => Ok(Side::Minus),
            _ => Err(Error::InvalidParameter(format!("side must be +1 or -1, got {sign}"))),
        }
    }
}

/// The two candidate odd-order profiles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OddForm {
    /// `1/2 ∓ (1/2π) ∫ sin 2π(yⁿ + sy) dy/y`.
    #[default]
    Sine,
    /// `1/2 ∓ (1/2π) p.v.∫ e(yⁿ) sin 2π(yⁿ + sy) dy/y`, which is also real.
    WeightedSine,
}

/// Controls for the oscillatory quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Multiplies the default split point `Y` between real segment and rotated tail.
    pub y_scale: f64,
    /// Panel width as a fraction of the local oscillation period.
    pub panel_fraction: f64,
    /// Absolute tolerance for the whole integral.
    pub tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { y_scale: 1.0, panel_fraction: 0.25, tol: 1e-11 }
    }
}

/// Tail is cut where the integrand has fallen below this.
const TAIL_CUTOFF: f64 = 1e-18;
const MAX_DEPTH: u32 = 24;
const MAX_PANELS: usize = 20_000_000;
/// Requested tolerances below this are raised to it; double rounding makes
/// anything smaller unreachable and only costs bisection time.
pub const MIN_TOL: f64 = 1e-14;

/// Split point with `n Y^{n-1}` comfortably above `|s|`.
fn split_point(n: u32, s: f64, cfg: &QuadConfig) -> f64 {
    let base = ((s.abs() + 4.0) / n as f64).powf(1.0 / (n as f64 - 1.0));
    cfg.y_scale * 1.25 * base.max(0.8)
}

fn check(est: Estimate, s: f64, tol: f64) -> Result<Estimate> {
    if est.converged && est.error <= tol.max(MIN_TOL) && est.value.re.is_finite() && est.value.im.is_finite() {
        Ok(est)
    } else {
        Err(Error::Quadrature { s, error_estimate: est.error })
    }
}

/// `∫₀^Y g(y) dy` with panels of at most `panel_fraction / (n y^{n-1} + |s| + 1)`.
fn real_segment(g: impl Fn(f64) -> Complex64, n: u32, s: f64, y_end: f64, cfg: &QuadConfig) -> Estimate {
    let freq = |y: f64| n as f64 * y.powi(n as i32 - 1) + s.abs() + 1.0;
    let mut total = Estimate::ZERO;
    let mut a = 0.0;
    let mut panels = 0usize;
    while a < y_end {
        let h0 = cfg.panel_fraction / freq(a);
        let h = (cfg.panel_fraction / freq(a + h0)).min(y_end - a);
        let b = if y_end - (a + h) < 1e-3 * h { y_end } else { a + h };
        let tol = cfg.tol.max(MIN_TOL) * (b - a) / y_end;
        total += adaptive(&g, a, b, tol, MAX_DEPTH);
        a = b;
        panels += 1;
        if panels > MAX_PANELS {
            total.converged = false;
            break;
        }
    }
    total
}

/// `∫_Y^∞ e(yⁿ + σy) dy/y` along `y = Y + r e^{iθ}`, `θ = π/(2n)`.
fn rotated_tail(n: u32, sigma: f64, y0: f64, cfg: &QuadConfig) -> Estimate {
    let dir = Complex64::from_polar(1.0, PI / (2.0 * n as f64));
    let psi = |y: Complex64| y.powu(n) + y * sigma;
    let integrand = |r: f64| {
        let y = y0 + dir * r;
        let p = psi(y);
        let re = p.re - p.re.round();
        Complex64::from_polar((-TAU * p.im).exp(), TAU * re) / y * dir
    };
    // Im ψ grows at least this fast in r
    let rate = (n as f64 * y0.powi(n as i32 - 1) - sigma.abs()) * dir.im;
    if !(rate > 0.0) {
        return Estimate { value: Complex64::new(f64::NAN, 0.0), error: f64::INFINITY, converged: false };
    }
    let mut total = Estimate::ZERO;
    let mut r = 0.0;
    let mut panels = 0usize;
    loop {
        let y = y0 + dir * r;
        let decay = (-TAU * psi(y).im).exp() / y.norm();
        if r > 0.0 && decay < TAIL_CUTOFF {
            // remainder bounded by decay / (2π rate)
            total.error += decay / (TAU * rate);
            break;
        }
        let slope = (y.powu(n - 1) * n as f64 + sigma).norm();
        let h = cfg.panel_fraction / slope.max(1.0);
        total += adaptive(&integrand, r, r + h, cfg.tol.max(MIN_TOL) * 1e-3, MAX_DEPTH);
        r += h;
        panels += 1;
        if panels > MAX_PANELS {
            total.converged = false;
            break;
        }
    }
    total
}

/// `I(s) = ∫_R e(yⁿ) sin(2πsy) dy/y` for even `n`.
pub fn even_integral(n: u32, s: f64, cfg: &QuadConfig) -> Result<Complex64> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("even integral needs even n >= 2, got {n}")));
    }
    if s == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let y_end = split_point(n, s, cfg);
    let g = |y: f64| {
        let w = if y == 0.0 { TAU * s } else { (TAU * s * y).sin() / y };
        crate::dd::cis_turns(y.powi(n as i32).fract()) * w
    };
    let head = real_segment(g, n, s, y_end, cfg);
    let tp = rotated_tail(n, s, y_end, cfg);
    let tm = rotated_tail(n, -s, y_end, cfg);
    // ∫_Y^∞ e(yⁿ) sin(2πsy)/y = (T(s) - T(-s)) / 2i
    let tail = Estimate {
        value: (tp.value - tm.value) / Complex64::new(0.0, 2.0),
        error: 0.5 * (tp.error + tm.error),
        converged: tp.converged && tm.converged,
    };
    let est = head + tail;
    let est = check(est, s, cfg.tol)?;
    Ok(est.value * 2.0)
}

/// `J(s) = ∫_R sin 2π(yⁿ + sy) dy/y` for odd `n`.
pub fn odd_integral(n: u32, s: f64, cfg: &QuadConfig) -> Result<f64> {
    if n < 3 || n % 2 != 1 {
        return Err(Error::InvalidParameter(format!("odd integral needs odd n >= 3, got {n}")));
    }
    let y_end = split_point(n, s, cfg);
    let g = |y: f64| {
        let v = if y == 0.0 {
            TAU * s
        } else {
            let ph = y.powi(n as i32) + s * y;
            (TAU * (ph - ph.round())).sin() / y
        };
        Complex64::new(v, 0.0)
    };
    let head = real_segment(g, n, s, y_end, cfg);
    let t = rotated_tail(n, s, y_end, cfg);
    let tail = Estimate { value: Complex64::new(t.value.im, 0.0), ..t };
    let est = check(head + tail, s, cfg.tol)?;
    Ok(2.0 * est.value.re)
}

/// Even-order profile `1/2 - side (1/2π) I(s)`.
pub fn profile_even(n: u32, s: f64, side: Side) -> Result<Complex64> {
    profile_even_with(n, s, side, &QuadConfig::default())
}

pub fn profile_even_with(n: u32, s: f64, side: Side, cfg: &QuadConfig) -> Result<Complex64> {
    let i = even_integral(n, s, cfg)?;
    Ok(Complex64::new(0.5, 0.0) - i * (side.sign() / TAU))
}

/// Odd-order profile `1/2 - side (1/2π) J(s)`.
pub fn profile_odd(n: u32, s: f64, side: Side) -> Result<f64> {
    profile_odd_with(n, s, side, OddForm::Sine, &QuadConfig::default())
}

pub fn profile_odd_with(n: u32, s: f64, side: Side, form: OddForm, cfg: &QuadConfig) -> Result<f64> {
    let integral = match form {
        OddForm::Sine => odd_integral(n, s, cfg)?,
        OddForm::WeightedSine => {
            // e(yⁿ) sin 2π(yⁿ+sy) = (e(2yⁿ+sy) - e(-sy)) / 2i; substituting
            // y = z 2^{-1/n} in the first part leaves J(s 2^{-1/n}) / 2, and
            // p.v.∫ e(-sy) dy/y = -iπ sign(s).
            let sigma = s * 2f64.powf(-1.0 / n as f64);
            0.5 * odd_integral(n, sigma, cfg)? + 0.5 * PI * sign0(s)
        }
    };
    Ok(0.5 - side.sign() * integral / TAU)
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `1/2 - side · ½ (1+i)(C(s) - i S(s))`, the quadratic profile in closed form.
pub fn quadratic_closed_form(s: f64, side: Side) -> Complex64 {
    let (c, sn) = fresnel::fresnel(s);
    Complex64::new(0.5, 0.0) - Complex64::new(1.0, 1.0) * Complex64::new(c, -sn) * (0.5 * side.sign())
}

/// `1/2 - side · ½ erf(√(π/2) e^{-iπ/4} s)`: the same profile under the
/// opposite sign convention `e(ξ) = exp(-2πiξ)`, i.e. its complex conjugate.
pub fn quadratic_closed_form_conj(s: f64, side: Side) -> Complex64 {
    Complex64::new(0.5, 0.0) - fresnel::erf_diagonal(s) * (0.5 * side.sign())
}

/// Moment `∫₀^∞ e(yⁿ) y^p dy = Γ(a)/n (2π)^{-a} e^{iπa/2}`, `a = (p+1)/n`, taken in the Abel sense.
pub fn moment(n: u32, p: u32) -> Complex64 {
    let a = (p as f64 + 1.0) / n as f64;
    Complex64::from_polar(gamma(a) / n as f64 * TAU.powf(-a), PI * a / 2.0)
}

/// Series diagnostic in powers of `s`, valid while the terms stay moderate.
///
/// Even `n`: `I(s) = 2 Σ_j (-1)^j (2πs)^{2j+1} / (2j+1)! · m_{2j}`.
/// Odd `n`: `J(s) = π/n + 2 Im Σ_{j>=1} (2πis)^j / j! · m_{j-1}`.
/// Returns the profile integral, or an error when the largest term exceeds `1e6`
/// (cancellation would then eat most of the significant digits).
pub fn series_integral(n: u32, s: f64) -> Result<Complex64> {
    const MAX_TERM: f64 = 1e6;
    let x = TAU * s;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut biggest: f64 = 0.0;
    // coefficient x^j / j! built incrementally
    let mut c = 1.0;
    for j in 1..400u32 {
        c *= x / j as f64;
        if c == 0.0 {
            break;
        }
        let term = if n % 2 == 0 {
            if j % 2 == 0 {
                continue;
            }
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            moment(n, j - 1) * (2.0 * sign * c)
        } else {
            let ij = match j % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            Complex64::new(2.0 * (ij * moment(n, j - 1) * c).im, 0.0)
        };
        // some odd-order terms vanish identically, so stop on the magnitude bound
        let size = (c * moment(n, j - 1).norm()).abs() * 2.0;
        biggest = biggest.max(size);
        sum += term;
        if size < 1e-17 * sum.norm().max(1e-300) && j > 8 {
            break;
        }
    }
    if biggest > MAX_TERM {
        return Err(Error::InvalidParameter(format!("series at s = {s} has terms up to {biggest:e}; use quadrature")));
    }
    if n % 2 == 1 {
        sum += PI / n as f64;
    }
    Ok(sum)
}

/// A profile together with its order and side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingingProfile {
    pub n: u32,
    pub side: Side,
    pub odd_form: OddForm,
    pub quad: QuadConfig,
}

impl RingingProfile {
    pub fn new(n: u32, side: Side) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("order n must be >= 2, got {n}")));
        }
        Ok(Self { n, side, odd_form: OddForm::default(), quad: QuadConfig::default() })
    }

    pub fn with_odd_form(self, odd_form: OddForm) -> Self {
        Self { odd_form, ..self }
    }

    pub fn is_even(&self) -> bool {
        self.n % 2 == 0
    }

    pub fn eval(&self, s: f64) -> Result<Complex64> {
        if self.is_even() {
            profile_even_with(self.n, s, self.side, &self.quad)
        } else {
            profile_odd_with(self.n, s, self.side, self.odd_form, &self.quad).map(|v| Complex64::new(v, 0.0))
        }
    }
}

/// `count` evenly spaced evaluations on `[s_lo, s_hi]`; failures carry the offending `s`.
pub fn profile_table(profile: &RingingProfile, s_lo: f64, s_hi: f64, count: usize) -> Result<Vec<(f64, Complex64)>> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("table needs at least 2 points, got {count}")));
    }
    if !(s_lo.is_finite() && s_hi.is_finite()) {
        return Err(Error::NonFinite(if s_lo.is_finite() { s_hi } else { s_lo }));
    }
    let step = (s_hi - s_lo) / (count - 1) as f64;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = if i + 1 == count { s_hi } else { s_lo + step * i as f64 };
            profile.eval(s).map(|v| (s, v))
        })
        .collect()
}

/// The true solution for indicator data sampled at `x = side·γ + s t^{1/n}`.
#[derive(Clone, Debug)]
pub struct Renormalized {
    config: ProblemConfig,
    time: Time,
    exact: Option<RationalSolution>,
    partial_k: u64,
}

impl Renormalized {
    /// Rational times use the exact solver; real times partial sums with `K >= 10 t^{-α}`.
    pub fn new(config: ProblemConfig, time: Time) -> Result<Self> {
        let f = indicator(config.gamma)?;
        let (exact, partial_k) = match time {
            Time::Rational(frac) => (Some(solve_rational(&f, frac, &IntPoly::monomial(config.n))?), 0),
            Time::Real(t) => {
                let t = t.to_f64();
                if !(t >= 0.0) {
                    return Err(Error::OutOfRange { value: t, range: "[0, inf)" });
                }
                let k = if t == 0.0 { 0 } else { (10.0 * t.powf(-default_alpha(config.n))).ceil() as u64 };
                (None, k)
            }
        };
        Ok(Self { config, time, exact, partial_k })
    }

    pub fn x_of(&self, s: f64, side: Side) -> f64 {
        side.sign() * self.config.gamma + s * self.time.to_f64().powf(1.0 / self.config.n as f64)
    }

    pub fn eval(&self, s: f64, side: Side) -> Complex64 {
        let x = self.x_of(s, side);
        match &self.exact {
            Some(sol) => sol.evaluate(x),
            None if self.time.to_f64() == 0.0 => indicator(self.config.gamma).expect("validated in new").evaluate(x),
            None => {
                let f = indicator(self.config.gamma).expect("validated in new");
                solution_partial_sum(&f, &self.time, x, self.partial_k, self.config.n)
            }
        }
    }
}

/// One-shot form of [`Renormalized::eval`].
pub fn renormalized_solution(config: ProblemConfig, t: Time, s: f64, side: Side) -> Result<Complex64> {
    Ok(Renormalized::new(config, t)?.eval(s, side))
}
