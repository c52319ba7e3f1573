//! Fuzz harness bodies. Each function accepts arbitrary bytes and panics only
//! when a library invariant is broken. Uses only `talbot` and `num-complex`,
//! so the seed corpus can also be replayed by an ordinary test.

use num_complex::Complex64;
use talbot::classd::l2_norm_sq;
use talbot::diophantine::{expand, is_approximant, Termination, DENOMINATOR_LIMIT};
use talbot::io::{piecewise_to_table, table_to_grid, table_to_piecewise, Table};
use talbot::{solve_rational, DoubleDouble, Fraction, IntPoly, PiecewisePeriodic, Time};

/// `Time` and `Fraction` parsing; whatever parses must survive `Display`.
pub fn parse_time(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = s.parse::<Time>() {
        let again: Time = t.to_string().parse().expect("displayed time parses");
        assert_eq!(again, t);
    }
    if let Ok(f) = s.parse::<Fraction>() {
        assert!(f.numer() <= f.denom() && f.denom() > 0);
        let again: Fraction = f.to_string().parse().expect("displayed fraction parses");
        assert_eq!(again, f);
    }
}

/// CSV tables and the typed views on them.
pub fn parse_table(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(table) = Table::parse(s) else { return };
    let text = table.to_csv();
    let again = Table::parse(&text).expect("written table parses");
    assert_eq!(again.to_csv(), text);
    if let Ok(f) = table_to_piecewise(&table) {
        assert_eq!(table_to_piecewise(&piecewise_to_table(&f)).expect("written data parses"), f);
    }
    let _ = table_to_grid(&table);
}

/// Continued fractions of the double-double made of the first 16 bytes.
pub fn expand_bits(data: &[u8]) {
    let Some(bytes) = data.get(..16) else { return };
    let hi = f64::from_le_bytes(bytes[..8].try_into().unwrap());
    let lo = f64::from_le_bytes(bytes[8..].try_into().unwrap());
    let t = DoubleDouble::new(hi, lo);
    let valid = t.is_finite() && t > DoubleDouble::ZERO && t < DoubleDouble::ONE;
    let max_terms = data.get(16).map_or(64, |&b| b as usize);
    let result = expand(t, max_terms);
    assert_eq!(result.is_ok(), valid, "t = {hi} + {lo}");
    let Ok(e) = result else { return };
    assert_eq!(e.quotients.len(), e.convergents.len());
    assert!(e.quotients.len() <= max_terms);
    let mut prev_q = 0;
    for c in &e.convergents {
        assert!(c.denom() >= prev_q && c.denom() <= DENOMINATOR_LIMIT);
        assert!(is_approximant(t, *c) || c.distance_from(t) == DoubleDouble::ZERO);
        prev_q = c.denom();
    }
    if e.termination == Termination::Exact {
        assert_eq!(e.convergents.last().expect("nonempty").distance_from(t), DoubleDouble::ZERO);
    }
}

/// Decodes `(u, q, n)` and piecewise data from bytes, solves exactly and checks
/// that the L² norm is conserved.
pub fn solve_bytes(data: &[u8]) {
    if data.len() < 4 {
        return;
    }
    let q = 1 + u16::from_le_bytes([data[0], data[1]]) as u64 % 400;
    let u = data[2] as u64 % (q + 1);
    let n = 2 + data[3] as u32 % 4;
    let mut breaks: Vec<f64> =
        data[4..].chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as f64 / 65536.0).take(16).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    if breaks.is_empty() {
        breaks.push(0.0);
    }
    let values = (0..breaks.len())
        .map(|i| {
            let b = data.get(4 + 2 * i).copied().unwrap_or(0);
            Complex64::new(b as f64 / 255.0, (b & 0x0f) as f64 / 15.0 - 0.5)
        })
        .collect();
    let f = PiecewisePeriodic::new(breaks, values).expect("valid by construction");
    let t = Fraction::new(u, q).expect("u <= q");
    let sol = solve_rational(&f, t, &IntPoly::monomial(n)).expect("valid input");
    assert!(sol.field.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    let (before, after) = (l2_norm_sq(&f), l2_norm_sq(&sol.field));
    assert!((after - before).abs() <= 1e-9 * before.max(1e-300), "{before} -> {after}");
}
