//! Exact solutions at rational times.
//!
//! At `t = u/q` the solution is a finite combination of translates,
//! `U(u/q, x) = (1/q) Σ_v G(u, v; q) f(x + v/q)`, so it is again piecewise
//! constant with jumps only at the initial jumps shifted by multiples of `1/q`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classd::{from_sweep, translate_rational, PiecewisePeriodic};
use crate::dd::CompensatedSum;
use crate::diophantine::Fraction;
use crate::error::{Error, Result};
use crate::expsum::{g_row, IntPoly};
use crate::series::GridField;

/// Coefficients `G/q` at or below this modulus are treated as exact zeros.
pub const COEFF_ZERO: f64 = 1e-13;

/// Left and right limits closer than this are not reported as jumps.
pub const JUMP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RationalSolution {
    pub time: Fraction,
    pub field: PiecewisePeriodic,
    pub poly: IntPoly,
}

impl RationalSolution {
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.field.evaluate(x)
    }
}

/// The weights `c_v = G(u, v; q) / q` of the translates `f(x + v/q)`.
pub fn translate_weights(t: Fraction, p: &IntPoly) -> Result<Vec<Complex64>> {
    let q = t.denom();
    let row = g_row(p, t.numer() as i64, q)?;
    let inv = 1.0 / q as f64;
    Ok(row
        .into_iter()
        .map(|g| {
            let c = g * inv;
            if c.norm() <= COEFF_ZERO {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
        .collect())
}

/// Cyclic prefix sums: `total(x) = Σ_{v=0}^{x-1} c_{v mod q}` for any integer `x`.
struct CyclicPrefix {
    prefix: Vec<Complex64>,
}

impl CyclicPrefix {
    fn new(c: &[Complex64]) -> Self {
        let mut prefix = Vec::with_capacity(c.len() + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(Complex64::new(0.0, 0.0));
        for &z in c {
            acc.add(z);
            prefix.push(acc.value());
        }
        Self { prefix }
    }

    fn total(&self, x: i64) -> Complex64 {
        let q = (self.prefix.len() - 1) as i64;
        let (wraps, rem) = (x.div_euclid(q), x.rem_euclid(q));
        self.prefix[q as usize] * wraps as f64 + self.prefix[rem as usize]
    }

    /// Sum of `c_{v mod q}` over integers `v` strictly between `a` and `b`.
    fn open_range(&self, a: f64, b: f64) -> Complex64 {
        let lo = a.floor() as i64 + 1;
        let hi = b.ceil() as i64 - 1;
        if hi < lo {
            return Complex64::new(0.0, 0.0);
        }
        self.total(hi + 1) - self.total(lo)
    }
}

/// Exact solution at `t` for initial data `f` under the dispersion polynomial `p`.
pub fn solve_rational(f: &PiecewisePeriodic, t: Fraction, p: &IntPoly) -> Result<RationalSolution> {
    let q = t.denom();
    let c = translate_weights(t, p)?;

    let points: Vec<f64> = c
        .par_iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .flat_map_iter(|(v, _)| translate_rational(f, v as u64, q).breakpoints().to_vec())
        .collect();

    let prefix = CyclicPrefix::new(&c);
    let qf = q as f64;
    let arcs: Vec<(f64, f64, Complex64)> = f.arcs().collect();
    // On an open arc of the union no translate jumps, so the value there is
    // Σ_a val_a · Σ{c_v : m + v/q ∈ arc a}.
    let value_at = |m: f64| -> Complex64 {
        let mut acc = CompensatedSum::new();
        for &(lo, hi, val) in &arcs {
            if val == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc.add(val * prefix.open_range(qf * (lo - m), qf * (hi - m)));
        }
        acc.value()
    };

    let field = from_sweep(points, value_at);
    Ok(RationalSolution { time: t, field, poly: p.clone() })
}

/// Samples the exact solution on `x_i = -1/2 + i/N`, `i = 0..N`.
pub fn grid_eval(sol: &RationalSolution, grid_size: usize) -> Result<GridField> {
    if grid_size == 0 {
        return Err(Error::InvalidParameter("grid size must be >= 1".into()));
    }
    let xs = GridField::uniform_grid(grid_size);
    let values = xs.iter().map(|&x| sol.evaluate(x)).collect();
    GridField::new(sol.time.to_f64(), xs, values)
}

/// Breakpoints across which the solution actually jumps.
pub fn jump_locations(sol: &RationalSolution) -> Vec<f64> {
    sol.field.jumps(JUMP_TOLERANCE)
}
