//! Command-line front end: exact and truncated solutions, limiting ringing
//! profiles, rational approximation, invariant checks and figure presets.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod figures;
pub mod svg;
pub mod verify;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use talbot::diophantine::{
    expand, expand_fraction, in_set_a_m, in_set_b, measure_estimate, MeasureTarget, DEFAULT_MAX_TERMS,
};
use talbot::io::{grid_to_table, piecewise_to_table, profile_to_table, Table};
use talbot::rational::grid_eval;
use talbot::ringing::{profile_table, OddForm};
use talbot::series::{default_alpha, smoothed_solution_u_star_grid, solution_partial_sum_grid};
use talbot::{
    solve_rational, DiophantineParams, GridField, IntPoly, ProblemConfig, RingingProfile, Side, SmoothCutoff, Time,
};

use crate::figures::Preset;
use crate::svg::Plot;
use crate::verify::Suite;

/// `1/π`, printed to 17 significant digits in CSV metadata.
pub const DEFAULT_GAMMA: f64 = std::f64::consts::FRAC_1_PI;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TALBOT_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "talbot", version, about = "Periodic dispersive evolution of jump data")]
pub struct RunConfig {
    /// Directory for files written without an explicit path.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact solution at a rational time, or a truncated series at a decimal time.
    Solve(SolveArgs),
    /// Truncated or smoothed Fourier series of the solution.
    Series(SeriesArgs),
    /// Table of the limiting profile at a jump.
    Ringing(RingingArgs),
    /// Continued fraction, convergents and approximation-set membership.
    Approx(ApproxArgs),
    /// Run invariant suites; exits non-zero if any fails.
    Verify(VerifyArgs),
    /// Regenerate a figure preset.
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Dispersion order.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Half-width of the initial indicator.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// CSV destination; `-` for stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write SVG plots of the real and imaginary parts.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Time as `u/q` (exact) or a decimal (truncated series).
    #[arg(long)]
    pub t: Time,
    /// Number of grid points on [-1/2, 1/2).
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Truncation for decimal times; defaults to `10 t^(-α)`.
    #[arg(long)]
    pub k: Option<u64>,
    /// Write the exact arcs (breakpoint, value) instead of grid samples.
    #[arg(long)]
    pub arcs: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub t: Time,
    /// Truncation `|k| <= K`.
    #[arg(long, default_value_t = 256)]
    pub k: u64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Use the smoothly cut-off series `U*` instead of the sharp truncation.
    #[arg(long)]
    pub smooth: bool,
    /// Cut-off exponent for `--smooth`.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OddFormArg {
    Sine,
    Weighted,
}

impl From<OddFormArg> for OddForm {
    fn from(f: OddFormArg) -> Self {
        match f {
            OddFormArg::Sine => OddForm::Sine,
            OddFormArg::Weighted => OddForm::WeightedSine,
        }
    }
}

#[derive(Debug, Args)]
pub struct RingingArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = SideArg::Plus)]
    pub side: SideArg,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub s_max: f64,
    #[arg(long, default_value_t = 161)]
    pub count: usize,
    /// Profile used for odd orders.
    #[arg(long, value_enum, default_value_t = OddFormArg::Sine)]
    pub odd_form: OddFormArg,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Scale factor for the split between the real segment and the rotated tail.
    #[arg(long)]
    pub y_scale: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Time as `u/q` or a decimal in [0, 1).
    #[arg(long)]
    pub t: Time,
    #[arg(long, default_value_t = 16)]
    pub terms: usize,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 0.4)]
    pub delta: f64,
    /// Defaults to the middle of `(1/(n-Δ), 1/(n-1))` at `Δ = 0.4`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Report membership of `t` in the approximation sets with this `m`.
    #[arg(long)]
    pub m: Option<u64>,
    /// Largest `M` checked for the "for all `M`" conditions.
    #[arg(long, default_value_t = talbot::diophantine::DEFAULT_HORIZON)]
    pub horizon: f64,
    /// Monte Carlo estimate of the measure of the set within `[0, t0]`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub preset: Preset,
    /// Grid size for x-plots.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn label(self) -> &'static str {
        match self {
            Part::Re => "re",
            Part::Im => "im",
        }
    }

    pub fn suffix(self) -> &'static str {
        self.label()
    }

    pub fn points(self, rows: &[(f64, Complex64)]) -> Vec<(f64, f64)> {
        rows.iter()
            .map(|&(x, z)| {
                (
                    x,
                    match self {
                        Part::Re => z.re,
                        Part::Im => z.im,
                    },
                )
            })
            .collect()
    }
}

pub fn write_table(dir: &Path, name: &str, table: &Table) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_plot(dir: &Path, name: &str, plot: &Plot) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    svg::write(plot, &path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes `table` to `--output` (or `<out_dir>/<default_name>`) and, with
/// `--plot`, SVGs of both parts next to it.
fn emit(
    out_dir: &Path,
    args: &OutputArgs,
    default_name: &str,
    table: &Table,
    title: &str,
    x_label: &str,
    rows: &[(f64, Complex64)],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let csv_path = match &args.output {
        Some(p) if p.as_os_str() == "-" => {
            std::io::stdout().write_all(table.to_csv().as_bytes())?;
            None
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = p.file_name().context("output path has no file name")?.to_string_lossy().into_owned();
            written.push(write_table(dir, &name, table)?);
            Some(p.clone())
        }
        None => {
            written.push(write_table(out_dir, default_name, table)?);
            Some(out_dir.join(default_name))
        }
    };
    if args.plot {
        let base = csv_path.unwrap_or_else(|| out_dir.join(default_name));
        let dir = base.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
        let stem = base.file_stem().context("output path has no file name")?.to_string_lossy().into_owned();
        for part in [Part::Re, Part::Im] {
            let plot = Plot::new(format!("{} {title}", part.label()), x_label, part.label())
                .with_series("", part.points(rows));
            written.push(write_plot(&dir, &format!("{stem}_{}.svg", part.suffix()), &plot)?);
        }
    }
    Ok(written)
}

fn field_rows(field: &GridField) -> Vec<(f64, Complex64)> {
    field.xs.iter().copied().zip(field.values.iter().copied()).collect()
}

fn solve(out_dir: &Path, a: &SolveArgs) -> Result<Vec<PathBuf>> {
    let n = a.problem.n;
    let config = ProblemConfig::new(n, a.problem.gamma)?;
    let f = config.initial_data();
    let (table, field) = match a.t {
        Time::Rational(frac) => {
            let sol = solve_rational(&f, frac, &IntPoly::monomial(n))?;
            let field = grid_eval(&sol, a.grid)?;
            let table = if a.arcs { piecewise_to_table(&sol.field) } else { grid_to_table(&field) };
            (table, field)
        }
        Time::Real(_) => {
            if a.arcs {
                bail!("--arcs needs a rational time u/q");
            }
            let t = a.t.to_f64();
            if !(t > 0.0) {
                bail!("decimal time must be positive, got {t}");
            }
            let k = a.k.unwrap_or_else(|| (10.0 * t.powf(-default_alpha(n))).ceil() as u64);
            let xs = GridField::uniform_grid(a.grid);
            let values = solution_partial_sum_grid(&f, &a.t, &xs, k, n);
            let field = GridField::new(t, xs, values)?;
            (grid_to_table(&field).with_meta("K", k), field)
        }
    };
    let table = table.with_meta("n", n).with_meta("gamma", a.problem.gamma).with_meta("time", a.t);
    emit(out_dir, &a.out, "solve.csv", &table, &format!("U({}, x), n = {n}", a.t), "x", &field_rows(&field))
}

fn series(out_dir: &Path, a: &SeriesArgs) -> Result<Vec<PathBuf>> {
    let n = a.problem.n;
    let f = ProblemConfig::new(n, a.problem.gamma)?.initial_data();
    let xs = GridField::uniform_grid(a.grid);
    let (values, label) = if a.smooth {
        let alpha = a.alpha.unwrap_or_else(|| default_alpha(n));
        (smoothed_solution_u_star_grid(&f, &a.t, &xs, n, alpha, &SmoothCutoff)?, format!("alpha={alpha}"))
    } else {
        (solution_partial_sum_grid(&f, &a.t, &xs, a.k, n), format!("K={}", a.k))
    };
    let field = GridField::new(a.t.to_f64(), xs, values)?;
    let (key, value) = label.split_once('=').expect("key=value");
    let table = grid_to_table(&field)
        .with_meta("n", n)
        .with_meta("gamma", a.problem.gamma)
        .with_meta("time", a.t)
        .with_meta(key, value);
    emit(out_dir, &a.out, "series.csv", &table, &format!("U({}, x), n = {n}, {label}", a.t), "x", &field_rows(&field))
}

fn ringing(out_dir: &Path, a: &RingingArgs) -> Result<Vec<PathBuf>> {
    let mut profile = RingingProfile::new(a.n, a.side.into())?.with_odd_form(a.odd_form.into());
    if let Some(tol) = a.tol {
        profile.quad.tol = tol;
    }
    if let Some(y) = a.y_scale {
        profile.quad.y_scale = y;
    }
    let data = match profile_table(&profile, a.s_min, a.s_max, a.count) {
        Ok(d) => d,
        Err(first) => {
            // Re-run point by point to name every failure, not just the first.
            let step = (a.s_max - a.s_min) / (a.count.max(2) - 1) as f64;
            let failed: Vec<String> = (0..a.count)
                .map(|i| a.s_min + step * i as f64)
                .filter_map(|s| profile.eval(s).err().map(|e| format!("  {e}")))
                .collect();
            if failed.is_empty() {
                return Err(first.into());
            }
            bail!("quadrature failed at {} points:\n{}", failed.len(), failed.join("\n"));
        }
    };
    let side = match a.side {
        SideArg::Plus => "+",
        SideArg::Minus => "-",
    };
    let table = profile_to_table(&data).with_meta("n", a.n).with_meta("side", side);
    emit(out_dir, &a.out, &format!("ringing_n{}.csv", a.n), &table, &format!("P(s), n = {}", a.n), "s", &data)
}

fn approx(a: &ApproxArgs) -> Result<()> {
    let t = a.t.to_dd();
    let terms = a.terms.min(DEFAULT_MAX_TERMS);
    let e = match a.t {
        Time::Rational(f) => expand_fraction(f, terms),
        Time::Real(_) => expand(t, terms)?,
    };
    let quotients: Vec<String> = e.quotients.iter().map(u64::to_string).collect();
    println!("t = {}", a.t);
    match quotients.split_first() {
        Some((head, tail)) => println!("continued fraction: [{head}; {}]", tail.join(", ")),
        None => println!("continued fraction: []"),
    }
    println!("termination: {:?}", e.termination);
    println!("{:>4} {:>24} {:>12} {:>12}", "k", "u/q", "|t - u/q|", "q^2|t-u/q|");
    for (k, c) in e.convergents.iter().enumerate() {
        let d = c.distance_from(t).to_f64().abs();
        let q = c.denom() as f64;
        println!("{k:>4} {:>24} {d:>12.4e} {:>12.6}", c.to_string(), q * q * d);
    }
    if let Some(m) = a.m {
        let alpha = a.alpha.unwrap_or_else(|| default_alpha(a.n));
        let params = DiophantineParams::new(a.n, a.delta, alpha, m)?;
        println!("in A_m (n={}, delta={}, m={m}): {}", a.n, a.delta, in_set_a_m(t, &params, a.horizon)?);
        println!("in B_m,alpha (alpha={alpha}): {}", in_set_b(t, &params, a.horizon)?);
        if let Some(samples) = a.samples {
            for (name, target) in [("A_m", MeasureTarget::SetA), ("B_m,alpha", MeasureTarget::SetB)] {
                let est = measure_estimate(&params, a.t0, samples, a.horizon, a.seed, target)?;
                println!("relative measure of {name} in [0, {}]: {est:.6} ({samples} samples)", a.t0);
            }
        }
    } else if a.samples.is_some() {
        bail!("--samples needs --m");
    }
    Ok(())
}

fn verify_suites(a: &VerifyArgs) -> bool {
    let mut all_passed = true;
    for suite in a.suite.expand() {
        match verify::run_suite(suite, a.seed, a.trials) {
            Ok(report) => {
                all_passed &= report.passed();
                println!("{report}");
            }
            Err(e) => {
                all_passed = false;
                println!("{:<12} FAIL error: {e}", suite.name());
            }
        }
    }
    println!("{}", if all_passed { "all suites passed" } else { "some suites failed" });
    all_passed
}

/// Executes one command. `Ok(false)` means it ran but a check failed.
pub fn run(config: &RunConfig) -> Result<bool> {
    let out_dir = &config.out_dir;
    let written = match &config.command {
        Command::Solve(a) => solve(out_dir, a)?,
        Command::Series(a) => series(out_dir, a)?,
        Command::Ringing(a) => ringing(out_dir, a)?,
        Command::Approx(a) => {
            approx(a)?;
            Vec::new()
        }
        Command::Verify(a) => return Ok(verify_suites(a)),
        Command::Figure(a) => figures::generate(a.preset, out_dir, a.grid)?,
    };
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(true)
}
