//! Period-1 piecewise-constant functions normalized to the midpoint value at
//! every jump.
//!
//! A function is stored as sorted breakpoints `b_0 < b_1 < ... < b_{r-1}` in
//! `[0, 1)` and one value per arc: `values[i]` holds on `(b_i, b_{i+1})`, and
//! the last value on the wrapping arc `(b_{r-1}, b_0 + 1)`. A constant is a
//! single breakpoint whose arc covers the whole period.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dd::{cis_turns, CompensatedSum, DoubleDouble};
use crate::error::{Error, Result};

/// Breakpoints closer than this are the same point.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Reduces `x` into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Cyclic distance between two points of the circle `R/Z`.
#[inline]
pub(crate) fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// `0 < γ < 1/2` and the order of the equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemConfig {
    pub n: u32,
    pub gamma: f64,
}

impl ProblemConfig {
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("order n must be >= 2, got {n}")));
        }
        check_gamma(gamma)?;
        Ok(Self { n, gamma })
    }

    pub fn initial_data(&self) -> PiecewisePeriodic {
        indicator(self.gamma).expect("validated on construction")
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 && gamma < 0.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: gamma, range: "(0, 1/2)" })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePeriodic {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl PiecewisePeriodic {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch { left: breakpoints.len(), right: values.len() });
        }
        if breakpoints.is_empty() {
            return Err(Error::InvalidBreakpoints("at least one breakpoint is required".into()));
        }
        if let Some(b) = breakpoints.iter().find(|b| !(**b >= 0.0 && **b < 1.0)) {
            return Err(Error::InvalidBreakpoints(format!("{b} not in [0, 1)")));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBreakpoints("not strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("arc values must be finite".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(c: Complex64) -> Self {
        Self { breakpoints: vec![0.0], values: vec![c] }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Arc `i` as `(start, end, value)`, with `end` possibly past 1 for the wrapping arc.
    pub fn arc(&self, i: usize) -> (f64, f64, Complex64) {
        let r = self.len();
        let start = self.breakpoints[i];
        let end = if i + 1 < r { self.breakpoints[i + 1] } else { self.breakpoints[0] + 1.0 };
        (start, end, self.values[i])
    }

    pub fn arcs(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        (0..self.len()).map(|i| self.arc(i))
    }

    /// Value left of breakpoint `i`.
    pub fn left_limit(&self, i: usize) -> Complex64 {
        self.values[if i == 0 { self.len() - 1 } else { i - 1 }]
    }

    /// Value right of breakpoint `i`.
    pub fn right_limit(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    /// Index of the arc containing `y ∈ [0, 1)` (ignoring breakpoint hits).
    #[inline]
    fn arc_index(&self, y: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= y);
        if i == 0 {
            self.len() - 1
        } else {
            i - 1
        }
    }

    /// Breakpoint within [`MERGE_TOLERANCE`] of `y`, if any.
    fn hit(&self, y: f64) -> Option<usize> {
        let r = self.len();
        let i = self.breakpoints.partition_point(|&b| b < y);
        [i % r, (i + r - 1) % r].into_iter().find(|&j| circle_distance(self.breakpoints[j], y) <= MERGE_TOLERANCE)
    }

    /// Value at `x`, using the average of the one-sided limits at a breakpoint.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let y = wrap_unit(x);
        match self.hit(y) {
            Some(j) => (self.left_limit(j) + self.right_limit(j)) * 0.5,
            None => self.values[self.arc_index(y)],
        }
    }

    /// Value at `x` assuming `x` is not on a breakpoint.
    #[inline]
    pub fn evaluate_interior(&self, x: f64) -> Complex64 {
        self.values[self.arc_index(wrap_unit(x))]
    }

    /// Breakpoints where the one-sided limits differ by more than `tol`.
    pub fn jumps(&self, tol: f64) -> Vec<f64> {
        (0..self.len())
            .filter(|&i| (self.right_limit(i) - self.left_limit(i)).norm() > tol)
            .map(|i| self.breakpoints[i])
            .collect()
    }

    /// Drops breakpoints that are not jumps (keeping one for a constant).
    pub fn simplified(&self) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.right_limit(i) != self.left_limit(i)).collect();
        if keep.is_empty() {
            return Self::constant(self.values[0]);
        }
        Self {
            breakpoints: keep.iter().map(|&i| self.breakpoints[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// The periodized indicator of `[-γ, γ]`, equal to 1/2 at `±γ`.
pub fn indicator(gamma: f64) -> Result<PiecewisePeriodic> {
    check_gamma(gamma)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    PiecewisePeriodic::new(vec![gamma, 1.0 - gamma], vec![zero, one])
}

/// `∫_0^1 f(ξ) e(-kξ) dξ`, exactly arc by arc.
pub fn fourier_coeff(f: &PiecewisePeriodic, k: i64) -> Complex64 {
    if k == 0 {
        return f.arcs().map(|(a, b, v)| v * (b - a)).collect::<CompensatedSum>().value();
    }
    // ∫_a^b e(-kξ) dξ = (e(-kb) - e(-ka)) / (-2πik); phases reduced mod 1 first.
    let phase = |x: f64| cis_turns(-wrap_unit_mul(x, k));
    let denom = Complex64::new(0.0, -2.0 * PI * k as f64);
    let sum: CompensatedSum = f.arcs().map(|(a, b, v)| v * (phase(b) - phase(a))).collect();
    sum.value() / denom
}

/// `frac(x k)` with an exact product.
#[inline]
fn wrap_unit_mul(x: f64, k: i64) -> f64 {
    crate::dd::frac_mul(x, k)
}

/// `g(x) = f(x + shift)`.
pub fn translate(f: &PiecewisePeriodic, shift: f64) -> PiecewisePeriodic {
    let s = wrap_unit(shift);
    if s == 0.0 {
        return f.clone();
    }
    shift_breakpoints(f, |b| {
        let y = b - s;
        if y < 0.0 {
            wrap_unit(y + 1.0)
        } else {
            y
        }
    })
}

/// `g(x) = f(x + v/q)`, with the shift reduced as an exact rational first.
pub fn translate_rational(f: &PiecewisePeriodic, v: u64, q: u64) -> PiecewisePeriodic {
    let shift = (v % q) as f64 / q as f64;
    translate(f, shift)
}

fn shift_breakpoints(f: &PiecewisePeriodic, map: impl Fn(f64) -> f64) -> PiecewisePeriodic {
    let mut pairs: Vec<(f64, Complex64)> = f.breakpoints.iter().zip(&f.values).map(|(&b, &v)| (map(b), v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    PiecewisePeriodic { breakpoints: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect() }
}

/// Merges sorted points of the circle that lie within `tol` of the start of
/// their cluster. Returns `(representative, cluster_start, cluster_end)`,
/// where a cluster that wraps through 0 has `cluster_start < 0`.
pub(crate) fn cluster_points(sorted: &[f64], tol: f64) -> Vec<(f64, f64, f64)> {
    let mut clusters: Vec<(f64, f64, f64)> = Vec::new();
    for &p in sorted {
        match clusters.last_mut() {
            Some(c) if p - c.1 <= tol => c.2 = p,
            _ => clusters.push((p, p, p)),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0];
        let last = *clusters.last().unwrap();
        if first.1 + 1.0 - last.2 <= tol {
            clusters.pop();
            clusters[0] = (first.0, last.1 - 1.0, first.2);
        }
    }
    clusters
}

/// Rebuilds a function from candidate breakpoints by evaluating `value_at` at
/// the midpoint of every arc between merged clusters.
pub(crate) fn from_sweep(mut points: Vec<f64>, value_at: impl Fn(f64) -> Complex64) -> PiecewisePeriodic {
    points.sort_by(f64::total_cmp);
    let clusters = cluster_points(&points, MERGE_TOLERANCE);
    if clusters.is_empty() {
        return PiecewisePeriodic::constant(value_at(0.5));
    }
    let r = clusters.len();
    let mut breakpoints = Vec::with_capacity(r);
    let mut values = Vec::with_capacity(r);
    for i in 0..r {
        let (rep, _, end) = clusters[i];
        let next_start = if i + 1 < r { clusters[i + 1].1 } else { clusters[0].1 + 1.0 };
        let mid = 0.5 * (end + next_start);
        breakpoints.push(rep);
        values.push(value_at(wrap_unit(mid)));
    }
    PiecewisePeriodic { breakpoints, values }
}

/// Pointwise linear combination `Σ c_i f_i`, over the union of breakpoints.
pub fn combine(coeffs: &[Complex64], fs: &[PiecewisePeriodic]) -> Result<PiecewisePeriodic> {
    if coeffs.len() != fs.len() {
        return Err(Error::LengthMismatch { left: coeffs.len(), right: fs.len() });
    }
    if fs.is_empty() {
        return Err(Error::InvalidParameter("combine needs at least one term".into()));
    }
    let points: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints.iter().copied()).collect();
    Ok(from_sweep(points, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, f) in coeffs.iter().zip(fs) {
            acc += c * f.evaluate_interior(x);
        }
        acc
    }))
}

/// `∫_0^1 |f|^2`, exactly arc by arc.
pub fn l2_norm_sq(f: &PiecewisePeriodic) -> f64 {
    let mut s = DoubleDouble::ZERO;
    for (a, b, v) in f.arcs() {
        s = s + DoubleDouble::from(v.norm_sqr()) * (b - a);
    }
    s.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn four_arc() -> PiecewisePeriodic {
        PiecewisePeriodic::new(
            vec![0.05, 0.3, 0.62, 0.9],
            vec![
                Complex64::new(0.3, -1.2),
                Complex64::new(-0.7, 0.4),
                Complex64::new(2.1, 0.0),
                Complex64::new(0.0, 0.9),
            ],
        )
        .unwrap()
    }

    #[test]
    fn indicator_values() {
        let g = 1.0 / PI;
        let f = indicator(g).unwrap();
        assert_eq!(f.evaluate(0.0), c(1.0));
        assert_eq!(f.evaluate(g), c(0.5));
        assert_eq!(f.evaluate(-g), c(0.5));
        let h = indicator(0.25).unwrap();
        assert_eq!(h.evaluate(0.5), c(0.0));
        assert_eq!(h.evaluate(0.75), c(0.5));
        assert_eq!(h.evaluate(3.1), c(1.0));
        assert!(indicator(0.5).is_err());
        assert!(indicator(0.0).is_err());
        assert!(indicator(f64::NAN).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(PiecewisePeriodic::new(vec![0.2, 0.1], vec![c(0.0), c(1.0)]).is_err());
        assert!(PiecewisePeriodic::new(vec![0.2, 1.0], vec![c(0.0), c(1.0)]).is_err());
        assert!(PiecewisePeriodic::new(vec![0.2], vec![c(0.0), c(1.0)]).is_err());
        assert!(PiecewisePeriodic::new(vec![], vec![]).is_err());
        assert!(PiecewisePeriodic::new(vec![0.2], vec![c(f64::NAN)]).is_err());
    }

    #[test]
    fn indicator_coefficients() {
        let g = 1.0 / PI;
        let f = indicator(g).unwrap();
        assert!((fourier_coeff(&f, 0) - c(2.0 * g)).norm() < 1e-15);
        for k in [1i64, 2, 3, 17, -5, 1000, 99_999] {
            let want = (2.0 * PI * g * k as f64).sin() / (PI * k as f64);
            let got = fourier_coeff(&f, k);
            assert!((got - c(want)).norm() < 1e-12, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn real_even_function_has_real_symmetric_coefficients() {
        let f = indicator(0.2).unwrap();
        for k in 1..20 {
            let a = fourier_coeff(&f, k);
            let b = fourier_coeff(&f, -k);
            assert!((a - b).norm() < 1e-15);
            assert!(a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn translate_identities() {
        let f = four_arc();
        assert_eq!(translate(&f, 0.0), f);
        assert_eq!(translate(&f, 1.0), f);
        let h = indicator(0.25).unwrap();
        assert_eq!(translate(&h, 0.5).evaluate(0.5), c(1.0));
        assert_eq!(translate_rational(&f, 3, 6), translate(&f, 0.5));
    }

    #[test]
    fn combine_cases() {
        let f = four_arc();
        assert_eq!(combine(&[c(1.0)], std::slice::from_ref(&f)).unwrap(), f);

        let zero = combine(&[c(1.0), c(-1.0)], &[f.clone(), f.clone()]).unwrap();
        assert!(zero.values().iter().all(|v| *v == c(0.0)));
        assert_eq!(zero.simplified(), PiecewisePeriodic::constant(c(0.0)));

        // (1/2)(χ + χ(· + 1/2)) at 0: χ(0) = 1, χ(1/2) = 0 for γ < 1/4.
        let chi = indicator(0.2).unwrap();
        let half = translate(&chi, 0.5);
        let g = combine(&[c(0.5), c(0.5)], &[chi.clone(), half.clone()]).unwrap();
        assert_eq!(g.evaluate(0.0), c(0.5));
        assert!(combine(&[c(1.0)], &[chi.clone(), half]).is_err());
        assert!(combine(&[], &[]).is_err());
    }

    #[test]
    fn norms() {
        let f = indicator(0.3).unwrap();
        assert!((l2_norm_sq(&f) - 0.6).abs() < 1e-15);
        assert_eq!(l2_norm_sq(&PiecewisePeriodic::constant(c(0.0))), 0.0);
        let g = four_arc();
        let k = Complex64::new(0.6, -1.7);
        assert!((l2_norm_sq(&g.scale(k)) - k.norm_sqr() * l2_norm_sq(&g)).abs() < 1e-13);
    }

    #[test]
    fn parseval_partial_sums_increase_to_norm() {
        let g = 1.0 / PI;
        let f = indicator(g).unwrap();
        let mut partial = fourier_coeff(&f, 0).norm_sqr();
        let mut last = partial;
        for k in 1..=10_000i64 {
            partial += fourier_coeff(&f, k).norm_sqr() + fourier_coeff(&f, -k).norm_sqr();
            assert!(partial >= last);
            last = partial;
        }
        assert!(partial <= 2.0 * g + 1e-12);
        assert!(2.0 * g - partial < 1e-3);
    }

    #[test]
    fn clusters_wrap_through_zero() {
        let pts = [1e-13, 0.3, 0.3 + 5e-13, 1.0 - 5e-13];
        let cl = cluster_points(&pts, MERGE_TOLERANCE);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].0, 1e-13);
        assert!(cl[0].1 < 0.0);
        assert_eq!(cl[1].0, 0.3);
    }

    #[test]
    fn translation_grid_check() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f = four_arc();
        for _ in 0..10_000 {
            let s: f64 = rng.random_range(-2.0..2.0);
            let x: f64 = rng.random_range(-1.0..1.0);
            let g = translate(&f, s);
            let d = (g.evaluate(x) - f.evaluate(wrap_unit(x + s))).norm();
            assert!(d <= 1e-14, "s={s} x={x}");
        }
    }

    fn arb_function() -> impl Strategy<Value = PiecewisePeriodic> {
        prop::collection::btree_set(0u32..10_000, 1..8).prop_flat_map(|set| {
            let bps: Vec<f64> = set.into_iter().map(|k| k as f64 / 10_000.0).collect();
            let r = bps.len();
            prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), r).prop_map(move |vals| {
                let vals = vals.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                PiecewisePeriodic::new(bps.clone(), vals).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn combine_is_pointwise_linear(
            f in arb_function(),
            g in arb_function(),
            a in (-2.0f64..2.0, -2.0f64..2.0),
            b in (-2.0f64..2.0, -2.0f64..2.0),
            x in 0.0f64..1.0,
        ) {
            let a = Complex64::new(a.0, a.1);
            let b = Complex64::new(b.0, b.1);
            let h = combine(&[a, b], &[f.clone(), g.clone()]).unwrap();
            // generic points and every breakpoint (midpoint convention)
            let mut xs = vec![x];
            xs.extend_from_slice(f.breakpoints());
            xs.extend_from_slice(g.breakpoints());
            for x in xs {
                let want = a * f.evaluate(x) + b * g.evaluate(x);
                prop_assert!((h.evaluate(x) - want).norm() < 1e-12);
            }
        }

        #[test]
        fn translate_matches_shifted_evaluation(f in arb_function(), s in -1.5f64..1.5, x in 0.0f64..1.0) {
            let g = translate(&f, s);
            prop_assert!((g.evaluate(x) - f.evaluate(x + s)).norm() <= 1e-14);
            prop_assert!((l2_norm_sq(&g) - l2_norm_sq(&f)).abs() < 1e-12);
        }
    }
}
