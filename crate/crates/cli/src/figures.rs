//! Presets regenerating the published plots as CSV tables and SVG files.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use num_complex::Complex64;

use talbot::io::{grid_to_table, profile_to_table, Table};
use talbot::rational::grid_eval;
use talbot::ringing::{profile_table, Renormalized};
use talbot::{solve_rational, Fraction, GridField, IntPoly, ProblemConfig, RingingProfile, Side, Time};

use crate::svg::Plot;
use crate::{write_plot, write_table, Part, DEFAULT_GAMMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    All,
}

impl Preset {
    const EACH: [Preset; 10] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Fig10,
    ];

    pub fn expand(self) -> Vec<Preset> {
        match self {
            Preset::All => Self::EACH.to_vec(),
            p => vec![p],
        }
    }
}

/// Denominators for the approach to `t = 0` with `n = 2`.
pub const FIG3_DENOMINATORS: [u64; 9] = [17, 33, 65, 129, 257, 513, 2049, 4097, 7374];
pub const FIG5_DENOMINATORS: [u64; 3] = [129, 2049, 4097];
pub const FIG6_DENOMINATORS: [u64; 4] = [202, 1616, 6464, 51712];
pub const FIG4_DENOMINATOR: u64 = 7374;
pub const FIG10_TIME: (u64, u64) = (468, 3277);
pub const PROFILE_RANGE: (f64, f64) = (-6.0, 6.0);
pub const PROFILE_POINTS: usize = 241;
pub const RENORMALIZED_RANGE: (f64, f64) = (-4.0, 4.0);
pub const RENORMALIZED_POINTS: usize = 401;

fn rows(field: &GridField) -> Vec<(f64, Complex64)> {
    field.xs.iter().copied().zip(field.values.iter().copied()).collect()
}

fn exact_grid(n: u32, t: Fraction, grid: usize) -> Result<GridField> {
    let f = ProblemConfig::new(n, DEFAULT_GAMMA)?.initial_data();
    Ok(grid_eval(&solve_rational(&f, t, &IntPoly::monomial(n))?, grid)?)
}

fn solution_table(field: &GridField, n: u32, t: Fraction) -> Table {
    grid_to_table(field).with_meta("n", n).with_meta("gamma", DEFAULT_GAMMA).with_meta("time", t)
}

/// `fig1` (real parts) and `fig2` (imaginary parts): `t = u/7`, two panels of four times each.
fn sevenths(dir: &Path, grid: usize, part: Part, name: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut panels = [
        Plot::new(format!("{} U(u/7, x), n = 2, u = 0..3", part.label()), "x", part.label()),
        Plot::new(format!("{} U(u/7, x), n = 2, u = 4..7", part.label()), "x", part.label()),
    ];
    for u in 0..=7u64 {
        let t = Fraction::new(u, 7)?;
        let field = exact_grid(2, t, grid)?;
        out.push(write_table(dir, &format!("{name}_u{u}.csv"), &solution_table(&field, 2, t))?);
        let panel = &mut panels[(u / 4) as usize];
        *panel = panel.clone().with_series(format!("u = {u}"), part.points(&rows(&field)));
    }
    out.push(write_plot(dir, &format!("{name}_u0-3.svg"), &panels[0])?);
    out.push(write_plot(dir, &format!("{name}_u4-7.svg"), &panels[1])?);
    Ok(out)
}

fn one_over_q(dir: &Path, grid: usize, n: u32, qs: &[u64], name: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for &q in qs {
        let t = Fraction::new(1, q)?;
        let field = exact_grid(n, t, grid)?;
        out.push(write_table(dir, &format!("{name}_q{q}.csv"), &solution_table(&field, n, t))?);
        let plot =
            Plot::new(format!("re U(1/{q}, x), n = {n}"), "x", "re U").with_series("", Part::Re.points(&rows(&field)));
        out.push(write_plot(dir, &format!("{name}_q{q}_re.svg"), &plot)?);
    }
    Ok(out)
}

/// Zoomed windows of the `t = 1/7374` solution at the jump and at the centre.
fn zoom(dir: &Path, grid: usize) -> Result<Vec<PathBuf>> {
    let t = Fraction::new(1, FIG4_DENOMINATOR)?;
    let f = ProblemConfig::new(2, DEFAULT_GAMMA)?.initial_data();
    let sol = solve_rational(&f, t, &IntPoly::monomial(2))?;
    let mut out = Vec::new();
    for (tag, centre) in [("jump", DEFAULT_GAMMA), ("centre", 0.0)] {
        let half_width = 0.01;
        let xs: Vec<f64> =
            (0..grid).map(|i| centre - half_width + 2.0 * half_width * i as f64 / (grid - 1).max(1) as f64).collect();
        let values = xs.iter().map(|&x| sol.evaluate(x)).collect();
        let field = GridField::new(t.to_f64(), xs, values)?;
        out.push(write_table(dir, &format!("fig4_{tag}.csv"), &solution_table(&field, 2, t))?);
        for part in [Part::Re, Part::Im] {
            let plot = Plot::new(
                format!("{} U(1/{FIG4_DENOMINATOR}, x) near x = {centre:.4}", part.label()),
                "x",
                part.label(),
            )
            .with_series("", part.points(&rows(&field)));
            out.push(write_plot(dir, &format!("fig4_{tag}_{}.svg", part.suffix()), &plot)?);
        }
    }
    Ok(out)
}

/// `U(t, γ + s t^{1/2})` for decreasing `t = 1/q`.
fn renormalized(dir: &Path) -> Result<Vec<PathBuf>> {
    let config = ProblemConfig::new(2, DEFAULT_GAMMA)?;
    let (lo, hi) = RENORMALIZED_RANGE;
    let step = (hi - lo) / (RENORMALIZED_POINTS - 1) as f64;
    let mut out = Vec::new();
    let mut plots = [
        Plot::new("re U(t, γ + s t^(1/2)), n = 2", "s", "re U"),
        Plot::new("im U(t, γ + s t^(1/2)), n = 2", "s", "im U"),
    ];
    for &q in &FIG6_DENOMINATORS {
        let t = Fraction::new(1, q)?;
        let r = Renormalized::new(config, Time::Rational(t))?;
        let data: Vec<(f64, Complex64)> = (0..RENORMALIZED_POINTS)
            .map(|i| {
                let s = lo + step * i as f64;
                (s, r.eval(s, Side::Plus))
            })
            .collect();
        let table = profile_to_table(&data).with_meta("n", 2).with_meta("gamma", DEFAULT_GAMMA).with_meta("time", t);
        out.push(write_table(dir, &format!("fig6_q{q}.csv"), &table)?);
        for (plot, part) in plots.iter_mut().zip([Part::Re, Part::Im]) {
            *plot = plot.clone().with_series(format!("t = 1/{q}"), part.points(&data));
        }
    }
    out.push(write_plot(dir, "fig6_re.svg", &plots[0])?);
    out.push(write_plot(dir, "fig6_im.svg", &plots[1])?);
    Ok(out)
}

/// Limiting profile tables; odd orders are real so only the real part is drawn.
fn profiles(dir: &Path, ns: &[u32], name: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for &n in ns {
        let profile = RingingProfile::new(n, Side::Plus)?;
        let (lo, hi) = PROFILE_RANGE;
        let data = profile_table(&profile, lo, hi, PROFILE_POINTS).with_context(|| format!("profile n = {n}"))?;
        out.push(write_table(dir, &format!("{name}_n{n}.csv"), &profile_to_table(&data).with_meta("n", n))?);
        let parts: &[Part] = if n % 2 == 0 { &[Part::Re, Part::Im] } else { &[Part::Re] };
        for &part in parts {
            let plot = Plot::new(format!("{} P(s), n = {n}", part.label()), "s", part.label())
                .with_series("", part.points(&data));
            out.push(write_plot(dir, &format!("{name}_n{n}_{}.svg", part.suffix()), &plot)?);
        }
    }
    Ok(out)
}

fn near_seventh(dir: &Path, grid: usize) -> Result<Vec<PathBuf>> {
    let t = Fraction::new(FIG10_TIME.0, FIG10_TIME.1)?;
    let field = exact_grid(2, t, grid)?;
    let mut out = vec![write_table(dir, "fig10.csv", &solution_table(&field, 2, t))?];
    for part in [Part::Re, Part::Im] {
        let plot = Plot::new(format!("{} U({t}, x), n = 2", part.label()), "x", part.label())
            .with_series("", part.points(&rows(&field)));
        out.push(write_plot(dir, &format!("fig10_{}.svg", part.suffix()), &plot)?);
    }
    Ok(out)
}

/// Writes every file of `preset` into `dir` and returns their paths in order.
pub fn generate(preset: Preset, dir: &Path, grid: usize) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in preset.expand() {
        let files = match p {
            Preset::Fig1 => sevenths(dir, grid, Part::Re, "fig1")?,
            Preset::Fig2 => sevenths(dir, grid, Part::Im, "fig2")?,
            Preset::Fig3 => one_over_q(dir, grid, 2, &FIG3_DENOMINATORS, "fig3")?,
            Preset::Fig4 => zoom(dir, grid)?,
            Preset::Fig5 => one_over_q(dir, grid, 3, &FIG5_DENOMINATORS, "fig5")?,
            Preset::Fig6 => renormalized(dir)?,
            Preset::Fig7 => profiles(dir, &[2], "fig7")?,
            Preset::Fig8 => profiles(dir, &[6], "fig8")?,
            Preset::Fig9 => profiles(dir, &[3, 17], "fig9")?,
            Preset::Fig10 => near_seventh(dir, grid)?,
            Preset::All => unreachable!("expanded above"),
        };
        out.extend(files);
    }
    Ok(out)
}
