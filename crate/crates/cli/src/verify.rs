//! Randomized invariant checks across the library, grouped into suites.
//! Each suite has its own RNG stream, so a suite gives the same report
//! whether it runs alone or as part of `all`.

use std::f64::consts::PI;
use std::fmt;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use talbot::classd::{fourier_coeff, indicator, l2_norm_sq, translate};
use talbot::diophantine::{convergents, is_approximant};
use talbot::expsum::{complete_sum, g_row};
use talbot::ringing::{profile_even, quadratic_closed_form};
use talbot::{solve_rational, DoubleDouble, Fraction, IntPoly, PiecewisePeriodic, Side, SmoothCutoff, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Diophantine,
    Classd,
    Expsum,
    Parseval,
    Symmetry,
    Translate,
    Series,
    Ringing,
}

impl Suite {
    const EACH: [Suite; 8] = [
        Suite::Diophantine,
        Suite::Classd,
        Suite::Expsum,
        Suite::Parseval,
        Suite::Symmetry,
        Suite::Translate,
        Suite::Series,
        Suite::Ringing,
    ];

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    fn stream(self) -> u64 {
        Self::EACH.iter().position(|&s| s == self).unwrap_or(0) as u64
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Diophantine => "diophantine",
            Suite::Classd => "classd",
            Suite::Expsum => "expsum",
            Suite::Parseval => "parseval",
            Suite::Symmetry => "symmetry",
            Suite::Translate => "translate",
            Suite::Series => "series",
            Suite::Ringing => "ringing",
        }
    }
}

/// Worst observed value of a statistic against its allowed limit.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub statistic: &'static str,
    pub worst: f64,
    pub limit: f64,
    pub checks: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.limit
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {} max {} = {:.3e} (limit {:.0e}, {} checks)",
            self.suite.name(),
            if self.passed() { "PASS" } else { "FAIL" },
            self.statistic,
            self.worst,
            self.limit,
            self.checks
        )
    }
}

struct Tally {
    worst: f64,
    checks: usize,
}

impl Tally {
    fn new() -> Self {
        Self { worst: 0.0, checks: 0 }
    }

    fn record(&mut self, v: f64) {
        // NaN must count as a failure
        self.worst = if v.is_nan() { f64::INFINITY } else { self.worst.max(v) };
        self.checks += 1;
    }

    fn report(self, suite: Suite, statistic: &'static str, limit: f64) -> SuiteReport {
        SuiteReport { suite, statistic, worst: self.worst, limit, checks: self.checks }
    }
}

pub fn random_piecewise(rng: &mut impl Rng) -> PiecewisePeriodic {
    let count = rng.random_range(1..=6);
    let mut b: Vec<f64> = (0..count).map(|_| rng.random::<f64>()).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    let v = b.iter().map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    PiecewisePeriodic::new(b, v).expect("sorted distinct points in [0, 1)")
}

fn random_fraction(rng: &mut impl Rng, max_q: u64) -> Fraction {
    let q = rng.random_range(1..=max_q);
    let u = rng.random_range(0..q);
    Fraction::new(u, q).expect("q >= 1")
}

fn arc_midpoints(f: &PiecewisePeriodic) -> Vec<f64> {
    f.arcs().map(|(a, b, _)| 0.5 * (a + b)).collect()
}

fn diophantine(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let t: f64 = rng.random();
        let td = DoubleDouble::from(t);
        for c in convergents(t, 12)? {
            let q = c.denom() as f64;
            let dist = c.distance_from(td).to_f64().abs();
            tally.record(if is_approximant(td, c) { q * q * dist } else { f64::INFINITY });
        }
    }
    Ok(tally.report(Suite::Diophantine, "q^2 |t - u/q|", 1.0))
}

fn classd(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let f = random_piecewise(rng);
        let a: f64 = rng.random_range(-2.0..2.0);
        let back = translate(&translate(&f, a), -a);
        for x in arc_midpoints(&f) {
            tally.record((back.evaluate(x) - f.evaluate(x)).norm());
        }
        let gamma = rng.random_range(0.01..0.49);
        let g = indicator(gamma)?;
        for k in 1..=20i64 {
            let want = (2.0 * PI * gamma * k as f64).sin() / (PI * k as f64);
            tally.record((fourier_coeff(&g, k) - want).norm());
        }
    }
    Ok(tally.report(Suite::Classd, "|difference|", 1e-12))
}

fn expsum(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let n = rng.random_range(2..=5);
        let p = IntPoly::monomial(n);
        let q = rng.random_range(2..=80u64);
        let u = rng.random_range(0..q as i64);
        let row = g_row(&p, u, q)?;
        for (v, g) in row.iter().enumerate() {
            let direct = complete_sum(&p, u, v as i64, q)?;
            tally.record((g - direct).norm() / q as f64);
        }
        // |G(u, v; q)| = √q for n = 2, odd q and gcd(u, q) = 1
        let q = 2 * rng.random_range(1..=200u64) + 1;
        let u = loop {
            let u = rng.random_range(1..q);
            if num_integer::gcd(u, q) == 1 {
                break u;
            }
        };
        let v = rng.random_range(0..q as i64);
        let g = complete_sum(&IntPoly::monomial(2), u as i64, v, q)?;
        tally.record((g.norm() / (q as f64).sqrt() - 1.0).abs());
    }
    Ok(tally.report(Suite::Expsum, "relative error", 1e-10))
}

fn parseval(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let f = random_piecewise(rng);
        let n = rng.random_range(2..=5);
        let t = random_fraction(rng, 300);
        let sol = solve_rational(&f, t, &IntPoly::monomial(n))?;
        let before = l2_norm_sq(&f);
        tally.record((l2_norm_sq(&sol.field) - before).abs() / before.max(f64::MIN_POSITIVE));
    }
    Ok(tally.report(Suite::Parseval, "relative norm change", 1e-10))
}

/// Real data: `u(1 - t) = conj u(t)` for even `n`, `u(t)` real for odd `n`,
/// and `u(1) = f`.
fn symmetry(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let f = random_piecewise(rng);
        let f = PiecewisePeriodic::new(
            f.breakpoints().to_vec(),
            f.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        )?;
        let n = rng.random_range(2..=5);
        let p = IntPoly::monomial(n);
        let t = random_fraction(rng, 120);
        let a = solve_rational(&f, t, &p)?;
        if n % 2 == 0 {
            let b = solve_rational(&f, Fraction::new(t.denom() - t.numer(), t.denom())?, &p)?;
            for x in arc_midpoints(&a.field) {
                tally.record((a.evaluate(x).conj() - b.evaluate(x)).norm());
            }
        } else {
            for x in arc_midpoints(&a.field) {
                tally.record(a.evaluate(x).im.abs());
            }
        }
        let one = solve_rational(&f, Fraction::new(t.denom(), t.denom())?, &p)?;
        for x in arc_midpoints(&f) {
            tally.record((one.evaluate(x) - f.evaluate(x)).norm());
        }
    }
    Ok(tally.report(Suite::Symmetry, "|difference|", 1e-12))
}

fn half_period(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    let half = Fraction::new(1, 2)?;
    for _ in 0..trials {
        let f = random_piecewise(rng);
        let sol = solve_rational(&f, half, &IntPoly::monomial(2))?;
        let shifted = translate(&f, 0.5);
        for x in arc_midpoints(&sol.field) {
            tally.record((sol.evaluate(x) - shifted.evaluate(x)).norm());
        }
    }
    Ok(tally.report(Suite::Translate, "|u(1/2) - f(. + 1/2)|", 1e-15))
}

fn series(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials {
        let f = random_piecewise(rng);
        let n = rng.random_range(2..=4);
        let frac = random_fraction(rng, 150);
        let sol = solve_rational(&f, frac, &IntPoly::monomial(n))?;
        let time = Time::Rational(frac);
        for k in -12..=12i64 {
            let evolved = fourier_coeff(&f, k) * Complex64::from_polar(1.0, 2.0 * PI * time.phase(k, n));
            tally.record((fourier_coeff(&sol.field, k) - evolved).norm());
        }
        let x: f64 = rng.random_range(0.05..20.0);
        let phi = SmoothCutoff;
        tally.record((phi.eval(x) + phi.eval(1.0 / x) - 1.0).abs());
    }
    Ok(tally.report(Suite::Series, "|difference|", 1e-10))
}

fn ringing(rng: &mut ChaCha8Rng, trials: usize) -> talbot::Result<SuiteReport> {
    let mut tally = Tally::new();
    for _ in 0..trials.min(10) {
        let s = rng.random_range(-5.0..5.0);
        let side = if rng.random() { Side::Plus } else { Side::Minus };
        tally.record((profile_even(2, s, side)? - quadratic_closed_form(s, side)).norm() / 1e-8);
        let s = rng.random_range(0.0..4.0);
        let sum = profile_even(4, s, Side::Plus)?.re + profile_even(4, -s, Side::Plus)?.re;
        tally.record((sum - 1.0).abs() / 1e-6);
    }
    Ok(tally.report(Suite::Ringing, "error / tolerance", 1.0))
}

/// Runs one suite with its own stream of the seeded generator.
pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> talbot::Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    match suite {
        Suite::All => Err(talbot::Error::InvalidParameter("expand `all` first".into())),
        Suite::Diophantine => diophantine(&mut rng, trials),
        Suite::Classd => classd(&mut rng, trials),
        Suite::Expsum => expsum(&mut rng, trials),
        Suite::Parseval => parseval(&mut rng, trials),
        Suite::Symmetry => symmetry(&mut rng, trials),
        Suite::Translate => half_period(&mut rng, trials),
        Suite::Series => series(&mut rng, trials),
        Suite::Ringing => ringing(&mut rng, trials),
    }
}
