//! Continued fractions, approximants and the approximation sets that decide
//! which irrational times the ringing asymptotics apply to.
//!
//! An *approximant* to `t` is a reduced fraction `u/q` with `|t - u/q| < 1/q^2`.
//! Every such fraction is a convergent of `t` or an intermediate fraction
//! `(u_{j-1} + k u_j) / (q_{j-1} + k q_j)`, so both families are enumerated
//! from a single continued-fraction expansion.
//!
//! Set membership is only checkable up to a finite horizon `M_max`: a time is
//! reported to lie in `A_m` when every integer `M` in `[m, M_max]` has an
//! approximant with `M^Δ < q <= M^(n-Δ)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Expansions stop before any convergent denominator exceeds this bound.
///
/// With a double-double time (relative error ~1e-32) the partial quotients
/// are those of the true number while `q^2` stays far below `1e32`.
pub const DENOMINATOR_LIMIT: u64 = 1 << 48;

/// Default cap on the number of partial quotients; inputs whose expansion
/// ends before this are treated as rational.
pub const DEFAULT_MAX_TERMS: usize = 64;

/// Default finite horizon standing in for "for all M".
pub const DEFAULT_HORIZON: f64 = 1e3;

/// A reduced fraction `u/q` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    u: u64,
    q: u64,
}

impl Fraction {
    /// Builds `u/q` in lowest terms; `u <= q` is required.
    pub fn new(u: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        if u > q {
            return Err(Error::OutOfRange { value: u as f64 / q as f64, range: "[0, 1]" });
        }
        let g = u.gcd(&q);
        Ok(Self { u: u / g, q: q / g })
    }

    pub const ZERO: Self = Self { u: 0, q: 1 };
    pub const ONE: Self = Self { u: 1, q: 1 };

    pub fn numer(&self) -> u64 {
        self.u
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.u as f64 / self.q as f64
    }

    pub fn to_dd(&self) -> DoubleDouble {
        DoubleDouble::from_ratio(self.u as i128, self.q as i128)
    }

    /// Signed distance `t - u/q` in double-double precision.
    pub fn distance_from(&self, t: DoubleDouble) -> DoubleDouble {
        t - self.to_dd()
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.u, self.q)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `u/q` (reduced on construction) or a bare integer `0` or `1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |part: &str| -> Result<u64> {
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("expected unsigned integer, got {part:?}")));
            }
            part.parse::<u64>().map_err(|e| Error::Parse(format!("{part:?}: {e}")))
        };
        match s.split_once('/') {
            Some((u, q)) => Fraction::new(parse(u)?, parse(q)?),
            None => Fraction::new(parse(s)?, 1),
        }
    }
}

/// Parameters of the approximation sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiophantineParams {
    pub n: u32,
    pub delta: f64,
    pub alpha: f64,
    pub m: u64,
}

impl DiophantineParams {
    /// Validates `n >= 2`, `Δ ∈ (0, 1)` (`(0, 1/2)` for `n = 2`), `m >= 2`
    /// and a positive finite `α`. Whether `α` lies in the asymptotic window is
    /// a separate question, see [`Self::alpha_in_asymptotic_window`].
    pub fn new(n: u32, delta: f64, alpha: f64, m: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("order n must be >= 2, got {n}")));
        }
        let delta_max = if n == 2 { 0.5 } else { 1.0 };
        if !(delta > 0.0 && delta < delta_max) {
            return Err(Error::OutOfRange { value: delta, range: if n == 2 { "(0, 1/2)" } else { "(0, 1)" } });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::OutOfRange { value: alpha, range: "(0, inf)" });
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m must be >= 2, got {m}")));
        }
        Ok(Self { n, delta, alpha, m })
    }

    /// The admissible `α` interval `(1/(n-Δ), 1/(n-1))` of the ringing asymptotics.
    pub fn asymptotic_alpha_window(&self) -> (f64, f64) {
        let n = self.n as f64;
        (1.0 / (n - self.delta), 1.0 / (n - 1.0))
    }

    /// The wider interval `(1/(n-Δ), 1/Δ)` under which the measure bounds hold.
    pub fn measure_alpha_window(&self) -> (f64, f64) {
        (1.0 / (self.n as f64 - self.delta), 1.0 / self.delta)
    }

    pub fn alpha_in_asymptotic_window(&self) -> bool {
        let (lo, hi) = self.asymptotic_alpha_window();
        self.alpha > lo && self.alpha < hi
    }

    pub fn alpha_in_measure_window(&self) -> bool {
        let (lo, hi) = self.measure_alpha_window();
        self.alpha > lo && self.alpha < hi
    }

    pub fn with_m(self, m: u64) -> Self {
        Self { m, ..self }
    }

    /// Denominator window `(M^Δ, M^(n-Δ)]`.
    pub fn window(&self, big_m: f64) -> (f64, f64) {
        (big_m.powf(self.delta), big_m.powf(self.n as f64 - self.delta))
    }
}

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The remainder vanished: the stored value is exactly the last convergent.
    Exact,
    /// The next convergent denominator would exceed [`DENOMINATOR_LIMIT`].
    DenominatorLimit,
    /// `max_terms` partial quotients were produced.
    TermLimit,
}

/// A continued-fraction expansion `[0; a_1, a_2, ...]` with its convergents.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub quotients: Vec<u64>,
    pub convergents: Vec<Fraction>,
    pub termination: Termination,
}

impl Expansion {
    /// Treats an expansion that ended well before the term cap as rational.
    pub fn looks_rational(&self) -> bool {
        self.termination != Termination::TermLimit
    }
}

fn check_unit_interval(t: DoubleDouble) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite(t.to_f64()));
    }
    if !(t > DoubleDouble::ZERO && t < DoubleDouble::ONE) {
        return Err(Error::OutOfRange { value: t.to_f64(), range: "(0, 1)" });
    }
    Ok(())
}

/// Exact dyadic value of an `f64` as `(mantissa, exponent)`.
fn decompose(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::from(0), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0xf_ffff_ffff_ffff;
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    (BigInt::from(sign) * BigInt::from(mant), e)
}

/// Expands the exact rational stored in `t` (a dyadic number).
pub fn expand(t: DoubleDouble, max_terms: usize) -> Result<Expansion> {
    check_unit_interval(t)?;
    let (mh, eh) = decompose(t.hi());
    let (ml, el) = decompose(t.lo());
    let e = eh.min(el);
    let num: BigInt = (mh << (eh - e) as usize) + (ml << (el - e) as usize);
    // t < 1 so e < 0.
    let den: BigInt = BigInt::from(1) << (-e) as usize;
    Ok(euclid(num, den, max_terms))
}

/// Exact expansion of a fraction; unlike [`expand`] this accepts `0/1` and `1/1`.
pub fn expand_fraction(f: Fraction, max_terms: usize) -> Expansion {
    euclid(BigInt::from(f.u), BigInt::from(f.q), max_terms)
}

/// Continued fraction of `num/den` by the Euclidean algorithm.
fn euclid(mut num: BigInt, mut den: BigInt, max_terms: usize) -> Expansion {
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    // seeds u_{-2}/q_{-2} = 0/1 and u_{-1}/q_{-1} = 1/0
    let (mut u_prev, mut q_prev): (u128, u128) = (0, 1);
    let (mut u_cur, mut q_cur): (u128, u128) = (1, 0);
    let limit = BigInt::from(DENOMINATOR_LIMIT);

    let termination = loop {
        if quotients.len() >= max_terms {
            break Termination::TermLimit;
        }
        let (a, r) = num.div_rem(&den);
        if a > limit {
            break Termination::DenominatorLimit;
        }
        let a: u64 = a.try_into().expect("bounded by the denominator limit");
        let (u_next, q_next) = (a as u128 * u_cur + u_prev, a as u128 * q_cur + q_prev);
        if q_next > DENOMINATOR_LIMIT as u128 {
            break Termination::DenominatorLimit;
        }
        quotients.push(a);
        (u_prev, q_prev, u_cur, q_cur) = (u_cur, q_cur, u_next, q_next);
        convergents.push(Fraction { u: u_cur as u64, q: q_cur as u64 });
        if r == BigInt::from(0) {
            break Termination::Exact;
        }
        num = den;
        den = r;
    };

    Expansion { quotients, convergents, termination }
}

/// Partial quotients `[0; a_1, a_2, ...]` of `t ∈ (0, 1)`.
pub fn continued_fraction(t: impl Into<DoubleDouble>, max_terms: usize) -> Result<Vec<u64>> {
    Ok(expand(t.into(), max_terms)?.quotients)
}

/// The first `count` convergents `u_j/q_j`, or all of them if the expansion is shorter.
pub fn convergents(t: impl Into<DoubleDouble>, count: usize) -> Result<Vec<Fraction>> {
    let mut cs = expand(t.into(), DEFAULT_MAX_TERMS.max(count))?.convergents;
    cs.truncate(count);
    Ok(cs)
}

/// `|t - u/q| < 1/q^2`, evaluated in double-double arithmetic.
pub fn is_approximant(t: DoubleDouble, f: Fraction) -> bool {
    let q2 = f.q as i128 * f.q as i128;
    f.distance_from(t).abs() < DoubleDouble::from_ratio(1, q2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    frac: Fraction,
    convergent: bool,
}

/// All approximants of `t` reachable from its expansion, precomputed so that
/// window queries over many `M` are cheap.
#[derive(Clone, Debug)]
pub struct Approximants {
    t: DoubleDouble,
    candidates: Vec<Candidate>,
}

impl Approximants {
    pub fn new(t: impl Into<DoubleDouble>) -> Result<Self> {
        let t = t.into();
        let exp = expand(t, DEFAULT_MAX_TERMS)?;
        let mut candidates = Vec::new();

        // Intermediate fractions between c_{j-1} and c_{j+1}; c_{-1} = 1/0.
        let mut push_intermediates = |prev: (u128, u128), cur: (u128, u128), a_next: Option<u64>| {
            let ks: Vec<u64> = match a_next {
                Some(a) if a <= 1 => Vec::new(),
                Some(a) if a <= 10 => (1..a).collect(),
                Some(a) => (1..=4).chain(a - 4..a).collect(),
                // unknown (huge) next quotient: only the small-k end can qualify
                None => (1..=4).collect(),
            };
            for k in ks {
                let u = prev.0 + k as u128 * cur.0;
                let q = prev.1 + k as u128 * cur.1;
                if q == 0 || q > DENOMINATOR_LIMIT as u128 || u > q {
                    continue;
                }
                let frac = Fraction { u: u as u64, q: q as u64 };
                if is_approximant(t, frac) {
                    candidates.push(Candidate { frac, convergent: false });
                }
            }
        };

        let mut prev = (1u128, 0u128);
        for (j, c) in exp.convergents.iter().enumerate() {
            let cur = (c.u as u128, c.q as u128);
            let a_next = exp.quotients.get(j + 1).copied();
            let a_next = match (a_next, exp.termination) {
                (Some(a), _) => Some(a),
                (None, Termination::Exact) => Some(0),
                (None, _) => None,
            };
            push_intermediates(prev, cur, a_next);
            prev = cur;
        }
        for c in &exp.convergents {
            if is_approximant(t, *c) {
                candidates.push(Candidate { frac: *c, convergent: true });
            }
        }
        candidates.sort_by_key(|c| (c.frac.q, c.frac.u));
        candidates.dedup_by_key(|c| c.frac);
        Ok(Self { t, candidates })
    }

    pub fn time(&self) -> DoubleDouble {
        self.t
    }

    /// Every approximant found, ordered by denominator.
    pub fn all(&self) -> impl Iterator<Item = Fraction> + '_ {
        self.candidates.iter().map(|c| c.frac)
    }

    /// Largest-denominator convergent in `(lo, hi]`, else the largest intermediate.
    pub fn in_window(&self, lo: f64, hi: f64) -> Option<Fraction> {
        let inside = |c: &&Candidate| (c.frac.q as f64) > lo && (c.frac.q as f64) <= hi;
        let best = |convergent: bool| {
            self.candidates.iter().filter(inside).filter(|c| c.convergent == convergent).map(|c| c.frac).next_back()
        };
        best(true).or_else(|| best(false))
    }

    pub fn for_horizon(&self, big_m: f64, params: &DiophantineParams) -> Option<Fraction> {
        let (lo, hi) = params.window(big_m);
        self.in_window(lo, hi)
    }

    fn covers(&self, from: f64, horizon: f64, params: &DiophantineParams) -> bool {
        let start = from.ceil().max(1.0);
        let end = horizon.floor();
        let mut big_m = start;
        while big_m <= end {
            if self.for_horizon(big_m, params).is_none() {
                return false;
            }
            big_m += 1.0;
        }
        true
    }
}

/// An approximant `u/q` with `M^Δ < q <= M^(n-Δ)`, if one exists.
pub fn find_approximant(
    t: impl Into<DoubleDouble>,
    big_m: f64,
    params: &DiophantineParams,
) -> Result<Option<Fraction>> {
    if !(big_m >= 2.0) {
        return Err(Error::OutOfRange { value: big_m, range: "[2, inf)" });
    }
    let found = Approximants::new(t)?.for_horizon(big_m, params);
    if let Some(f) = found {
        let (lo, hi) = params.window(big_m);
        debug_assert!((f.q as f64) > lo && (f.q as f64) <= hi);
    }
    Ok(found)
}

/// Finite-horizon membership in `A_m`: an approximant exists for every integer `M ∈ [m, M_max]`.
pub fn in_set_a_m(t: impl Into<DoubleDouble>, params: &DiophantineParams, horizon: f64) -> Result<bool> {
    if horizon < params.m as f64 {
        return Err(Error::InvalidParameter(format!("horizon {horizon} below m = {}", params.m)));
    }
    Ok(Approximants::new(t)?.covers(params.m as f64, horizon, params))
}

/// Finite-horizon membership in `B_{m,α}`: an approximant for every integer
/// `M ∈ [m t^(-α), M_max]`. An empty range counts as membership.
pub fn in_set_b(t: impl Into<DoubleDouble>, params: &DiophantineParams, horizon: f64) -> Result<bool> {
    let t = t.into();
    let set = Approximants::new(t)?;
    Ok(set.covers(b_threshold(t, params), horizon, params))
}

fn b_threshold(t: DoubleDouble, params: &DiophantineParams) -> f64 {
    params.m as f64 * t.to_f64().powf(-params.alpha)
}

/// Which set [`measure_estimate`] samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureTarget {
    SetA,
    SetB,
}

/// Uniform sample in `(0, t0)` with double-double resolution.
fn sample_time(rng: &mut ChaCha8Rng, t0: f64) -> DoubleDouble {
    loop {
        let hi: f64 = rng.random();
        let lo: f64 = rng.random::<f64>() * f64::EPSILON;
        let t = DoubleDouble::new(hi, lo) * t0;
        if t > DoubleDouble::ZERO && t.to_f64() < t0 {
            return t;
        }
    }
}

/// The time sampled for index `i` of a run seeded with `seed`.
pub fn sample_for_index(seed: u64, i: u64, t0: f64) -> DoubleDouble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    sample_time(&mut rng, t0)
}

/// Monte Carlo estimate of the measure of the chosen set within `[0, t0]`,
/// as a fraction of `t0`. Deterministic for a given `(seed, samples)`.
pub fn measure_estimate(
    params: &DiophantineParams,
    t0: f64,
    samples: usize,
    horizon: f64,
    seed: u64,
    target: MeasureTarget,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(Error::OutOfRange { value: t0, range: "(0, 1]" });
    }
    let hits = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let t = sample_for_index(seed, i, t0);
            let set = Approximants::new(t).expect("samples lie in (0, 1)");
            let from = match target {
                MeasureTarget::SetA => params.m as f64,
                MeasureTarget::SetB => b_threshold(t, params),
            };
            set.covers(from, horizon, params) as usize
        })
        .sum::<usize>();
    Ok(hits as f64 / samples as f64)
}
