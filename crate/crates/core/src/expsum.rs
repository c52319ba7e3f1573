//! Complete exponential sums `G(u, v; q) = Σ_{w mod q} e_q(u P(w) - v w)`,
//! Weyl sums over real polynomials, and the classical bound functionals they
//! are compared against.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use rustfft::FftPlanner;

use crate::dd::{CompensatedSum, DoubleDouble};
use crate::error::{Error, Result};

/// Rows with `q` up to this size are summed directly, which keeps small
/// cases such as `G(1, v; 2)` exact.
pub const DIRECT_ROW_LIMIT: u64 = 16;

/// Polynomial with integer coefficients, `coeffs[i]` multiplying `w^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        match coeffs.last() {
            Some(&c) if c != 0 && coeffs.len() >= 2 => Ok(Self { coeffs }),
            _ => Err(Error::InvalidParameter(
                "integer polynomial needs degree >= 1 and a nonzero leading coefficient".into(),
            )),
        }
    }

    /// `P(w) = w^n`.
    pub fn monomial(n: u32) -> Self {
        assert!(n >= 1, "degree must be >= 1");
        let mut coeffs = vec![0; n as usize + 1];
        coeffs[n as usize] = 1;
        Self { coeffs }
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_monic_monomial(&self) -> bool {
        let n = self.coeffs.len() - 1;
        self.coeffs[n] == 1 && self.coeffs[..n].iter().all(|&c| c == 0)
    }

    /// `P(w) mod q` in `[0, q)`, by Horner's rule in 128-bit arithmetic.
    pub fn eval_mod(&self, w: u64, q: u64) -> u64 {
        let q = q as i128;
        let w = (w as i128) % q;
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * w + c as i128).rem_euclid(q);
        }
        acc as u64
    }
}

/// Real polynomial `f(k) = Σ a_i k^i`, coefficients in double-double.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<DoubleDouble>,
}

impl RealPoly {
    pub fn new(coeffs: Vec<DoubleDouble>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("real polynomial needs finite coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    /// `f(k) = t k^n`.
    pub fn leading(t: DoubleDouble, n: u32) -> Self {
        let mut coeffs = vec![DoubleDouble::ZERO; n as usize + 1];
        coeffs[n as usize] = t;
        Self { coeffs }
    }

    /// `f(k) mod 1` evaluated in double-double.
    pub fn phase(&self, k: i64) -> f64 {
        let kk = DoubleDouble::from(k as f64);
        let mut acc = DoubleDouble::ZERO;
        for &c in self.coeffs.iter().rev() {
            // reducing mod 1 after each step keeps the magnitude small, and
            // is valid because k is an integer
            acc = (acc * kk).fract() + c.fract();
        }
        acc.fract().to_f64()
    }
}

/// `exp(2πi r/q)`, exact at multiples of a quarter turn.
#[inline]
pub fn unit_root(r: u64, q: u64) -> Complex64 {
    let r = r % q;
    if (4 * r as u128) % q as u128 == 0 {
        return match (4 * r as u128 / q as u128) as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // centre the angle so that r/q and (q - r)/q give conjugate results
    let signed = if 2 * r > q { r as f64 - q as f64 } else { r as f64 };
    let (s, c) = (TAU * signed / q as f64).sin_cos();
    Complex64::new(c, s)
}

fn reduce(x: i64, q: u64) -> u64 {
    (x as i128).rem_euclid(q as i128) as u64
}

/// `G(u, v; q)` summed directly with exact integer phase reduction.
pub fn complete_sum(p: &IntPoly, u: i64, v: i64, q: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    let (u, v) = (reduce(u, q), reduce(v, q));
    let sum: CompensatedSum = (0..q)
        .map(|w| {
            let up = (u as u128 * p.eval_mod(w, q) as u128) % q as u128;
            let vw = (v as u128 * w as u128) % q as u128;
            let r = (up + q as u128 - vw) % q as u128;
            unit_root(r as u64, q)
        })
        .collect();
    Ok(sum.value())
}

/// The whole row `v ↦ G(u, v; q)` for `v = 0..q`, as one DFT of `w ↦ e_q(u P(w))`.
pub fn g_row(p: &IntPoly, u: i64, q: u64) -> Result<Vec<Complex64>> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    if q <= DIRECT_ROW_LIMIT {
        return (0..q as i64).map(|v| complete_sum(p, u, v, q)).collect();
    }
    let u = reduce(u, q);
    let mut buf: Vec<Complex64> =
        (0..q).map(|w| unit_root(((u as u128 * p.eval_mod(w, q) as u128) % q as u128) as u64, q)).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(q as usize);
    fft.process(&mut buf);
    Ok(buf)
}

/// `Σ_{k=lo}^{hi} e(f(k))`, each phase reduced mod 1 in double-double first.
pub fn weyl_sum(f: &RealPoly, k_lo: i64, k_hi: i64) -> Result<Complex64> {
    if k_lo > k_hi {
        return Err(Error::InvalidParameter(format!("empty range {k_lo}..={k_hi}")));
    }
    let sum: CompensatedSum = (k_lo..=k_hi).map(|k| crate::dd::cis_turns(f.phase(k))).collect();
    Ok(sum.value())
}

/// `gcd(u, v, q)` with the convention `gcd(0, 0, q) = q`.
pub fn gcd3(u: i64, v: i64, q: u64) -> u64 {
    reduce(u, q).gcd(&reduce(v, q)).gcd(&q)
}

/// `|G(u, v; q)| / sqrt(gcd(u, v, q) q)`.
pub fn gauss_bound_ratio(p: &IntPoly, u: i64, v: i64, q: u64) -> Result<f64> {
    if !p.is_monic_monomial() {
        return Err(Error::InvalidParameter("bound ratio is defined for P(w) = w^n".into()));
    }
    let g = complete_sum(p, u, v, q)?;
    Ok(g.norm() / ((gcd3(u, v, q) as f64) * q as f64).sqrt())
}

/// N-th root (`N = 2^(n-1)`) of `μ^(N-1) + μ^(N-n+ε) (μ^(n-1)/q + 1)(μ + q) log q`,
/// directly comparable with `|Σ e(f(k))|` over `μ` consecutive integers.
pub fn weyl_bound(mu: f64, q: u64, n: u32, eps: f64) -> f64 {
    let big_n = 2f64.powi(n as i32 - 1);
    let nf = n as f64;
    let qf = q as f64;
    let inner = mu.powf(big_n - 1.0) + mu.powf(big_n - nf + eps) * (mu.powf(nf - 1.0) / qf + 1.0) * (mu + qf) * qf.ln();
    inner.powf(1.0 / big_n)
}

/// `{M^-1 + q^-1 + q M^-n}^(2^(1-n)) M^(1+ε) q^ε`.
pub fn hua_bound(big_m: f64, q: u64, n: u32, eps: f64) -> f64 {
    let qf = q as f64;
    let braces = 1.0 / big_m + 1.0 / qf + qf * big_m.powi(-(n as i32));
    braces.powf(2f64.powi(1 - n as i32)) * big_m.powf(1.0 + eps) * qf.powf(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_row(p: &IntPoly, u: i64, q: u64) -> Vec<Complex64> {
        (0..q as i64).map(|v| complete_sum(p, u, v, q).unwrap()).collect()
    }

    #[test]
    fn trivial_sums() {
        let p = IntPoly::monomial(2);
        assert_eq!(complete_sum(&p, 0, 0, 9).unwrap(), Complex64::new(9.0, 0.0));
        assert_eq!(complete_sum(&p, 1, 0, 2).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(complete_sum(&p, 1, 1, 2).unwrap(), Complex64::new(2.0, 0.0));
        assert!(complete_sum(&p, 1, 1, 0).is_err());
    }

    #[test]
    fn rows_for_degenerate_inputs() {
        let p = IntPoly::monomial(3);
        assert_eq!(g_row(&p, 5, 1).unwrap(), vec![Complex64::new(1.0, 0.0)]);
        let row = g_row(&p, 0, 101).unwrap();
        assert!((row[0] - Complex64::new(101.0, 0.0)).norm() < 1e-10);
        assert!(row[1..].iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn row_matches_naive_small() {
        for n in [2, 3, 4] {
            let p = IntPoly::monomial(n);
            for q in [17u64, 31, 64, 97, 128, 243] {
                for u in [1i64, 2, 5, q as i64 - 1] {
                    let fast = g_row(&p, u, q).unwrap();
                    let slow = naive_row(&p, u, q);
                    let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    assert!(err <= 1e-10 * q as f64, "n={n} q={q} u={u} err={err}");
                }
            }
        }
    }

    #[test]
    fn quadratic_gauss_sum_modulus() {
        // brute force: |G(u, 0; p)| = sqrt(p) for odd primes p not dividing u
        let p2 = IntPoly::monomial(2);
        for q in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            for u in 1..q.min(6) as i64 {
                let r = gauss_bound_ratio(&p2, u, 0, q).unwrap();
                assert!((r - 1.0).abs() < 1e-12, "q={q} u={u} r={r}");
            }
        }
        assert!((gauss_bound_ratio(&p2, 0, 0, 50).unwrap() - 1.0).abs() < 1e-12);
        assert!(gauss_bound_ratio(&IntPoly::new(vec![1, 0, 1]).unwrap(), 1, 0, 5).is_err());
    }

    #[test]
    fn general_polynomial_and_negative_arguments() {
        let p = IntPoly::new(vec![3, -2, 0, 1]).unwrap();
        assert_eq!(p.eval_mod(4, 7), (64 - 8 + 3) % 7);
        let a = complete_sum(&p, -3, -5, 11).unwrap();
        let b = complete_sum(&p, 8, 6, 11).unwrap();
        assert_eq!(a, b);
        assert!(IntPoly::new(vec![1, 0]).is_err());
        assert!(IntPoly::new(vec![1]).is_err());
    }

    #[test]
    fn weyl_sum_basic_cases() {
        let zero = RealPoly::new(vec![DoubleDouble::ZERO]).unwrap();
        assert_eq!(weyl_sum(&zero, 1, 10).unwrap(), Complex64::new(10.0, 0.0));
        let half = RealPoly::new(vec![DoubleDouble::ZERO, DoubleDouble::from(0.5)]).unwrap();
        assert!(weyl_sum(&half, 0, 1).unwrap().norm() < 1e-15);
        assert!(weyl_sum(&zero, 2, 1).is_err());
    }

    #[test]
    fn weyl_sum_matches_fixed_point_oracle() {
        use num_bigint::BigUint;
        // sqrt(2) as a 256-bit fixed-point fraction, phases reduced exactly
        let bits = 256u32;
        let scale = BigUint::from(1u8) << bits;
        let r2: BigUint = (BigUint::from(2u8) << (2 * bits)).sqrt();
        let mask = &scale - 1u8;
        let mut want = CompensatedSum::new();
        for k in 1u64..=10_000 {
            let ph: BigUint = (&r2 * BigUint::from(k * k)) & &mask;
            let top: BigUint = ph >> (bits - 64);
            let turns = top.to_u64_digits().first().copied().unwrap_or(0) as f64 / 2f64.powi(64);
            want.add(crate::dd::cis_turns(turns));
        }
        let want = want.value();
        let f = RealPoly::leading(DoubleDouble::from(2.0).sqrt(), 2);
        let got = weyl_sum(&f, 1, 10_000).unwrap();
        assert!((got - want).norm() <= 1e-6 * want.norm(), "{got} vs {want}");
    }

    #[test]
    fn bound_formulas() {
        // (100 + 1 * (1 + 1) * 200 * ln 100)^(1/2)
        let want = (100.0 + 2.0 * 200.0 * 100f64.ln()).sqrt();
        assert!((weyl_bound(100.0, 100, 2, 0.0) - want).abs() < 1e-12);
        assert!((want - 44.068).abs() < 1e-3);
        assert!(weyl_bound(2.0, 2, 3, 0.05).is_finite() && weyl_bound(2.0, 2, 3, 0.05) > 0.0);

        assert!((hua_bound(100.0, 100, 2, 0.0) - 0.03f64.sqrt() * 100.0).abs() < 1e-12);
        let m: f64 = 50.0;
        let want = (1.0 / m + 1.0 + m.powi(-3)).powf(0.25) * m;
        assert!((hua_bound(m, 1, 3, 0.0) - want).abs() < 1e-12);
        let q = 50u64 * 50;
        assert!(hua_bound(m, q, 2, 0.0) >= m.powf(1.0 - 0.5));
    }

    #[test]
    fn unit_root_symmetry() {
        assert_eq!(unit_root(1, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(3, 4), Complex64::new(0.0, -1.0));
        let a = unit_root(2, 7);
        let b = unit_root(5, 7);
        assert_eq!(a, b.conj());
    }

    proptest! {
        #[test]
        fn sums_are_periodic_and_bounded(n in 2u32..6, q in 1u64..200, u in -500i64..500, v in -500i64..500) {
            let p = IntPoly::monomial(n);
            let g = complete_sum(&p, u, v, q).unwrap();
            prop_assert!(g.norm() <= q as f64 * (1.0 + 1e-12));
            prop_assert_eq!(g, complete_sum(&p, u, v + q as i64, q).unwrap());
        }
    }
}
