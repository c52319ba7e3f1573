//! Static line plots. Output depends only on the input data, so equal data
//! gives byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 56.0;

/// Fraction of the y-range left free above and below the data.
const Y_PADDING: f64 = 0.05;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

type Range = (f64, f64);

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("nothing to plot")]
    Empty,
    #[error("series {series:?} has a non-finite point at index {index}")]
    NonFinite { series: String, index: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new() }
    }

    pub fn with_series(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { label: label.into(), points });
        self
    }

    fn bounds(&self) -> Result<(Range, Range), SvgError> {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for (index, &(px, py)) in s.points.iter().enumerate() {
                if !(px.is_finite() && py.is_finite()) {
                    return Err(SvgError::NonFinite { series: s.label.clone(), index });
                }
                x = (x.0.min(px), x.1.max(px));
                y = (y.0.min(py), y.1.max(py));
            }
        }
        if x.0 > x.1 {
            return Err(SvgError::Empty);
        }
        let (y0, y1) = widen(y);
        let pad = Y_PADDING * (y1 - y0);
        Ok((widen(x), (y0 - pad, y1 + pad)))
    }
}

/// Gives a degenerate range some extent so it can be mapped to pixels.
fn widen((lo, hi): Range) -> Range {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 0.5 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Step from {1, 2, 5} × 10^k giving about `target` intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = tick_step(hi - lo, 6.0);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

fn label(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // "-0.0" and friends
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render(plot: &Plot) -> Result<String, SvgError> {
    if plot.series.iter().all(|s| s.points.is_empty()) {
        return Err(SvgError::Empty);
    }
    let ((x0, x1), (y0, y1)) = plot.bounds()?;
    let left = MARGIN_LEFT;
    let right = WIDTH - MARGIN_RIGHT;
    let top = MARGIN_TOP;
    let bottom = HEIGHT - MARGIN_BOTTOM;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        0.5 * (left + right),
        escape(&plot.title)
    );

    let (xt, xd) = ticks(x0, x1);
    let (yt, yd) = ticks(y0, y1);
    let _ = writeln!(out, r##"<g stroke="#e0e0e0" stroke-width="1">"##);
    for &t in &xt {
        let _ = writeln!(out, r#"<line x1="{0:.2}" y1="{top:.2}" x2="{0:.2}" y2="{bottom:.2}"/>"#, px(t));
    }
    for &t in &yt {
        let _ = writeln!(out, r#"<line x1="{left:.2}" y1="{0:.2}" x2="{right:.2}" y2="{0:.2}"/>"#, py(t));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let _ = writeln!(out, r#"<g text-anchor="middle">"#);
    for &t in &xt {
        let x = px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}">{}</text>"#, bottom + 19.0, label(t, xd));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        0.5 * (left + right),
        HEIGHT - 12.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g text-anchor="end">"#);
    for &t in &yt {
        let y = py(t);
        let _ =
            writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, left - 8.0, y + 4.0, label(t, yd));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        0.5 * (top + bottom),
        escape(&plot.y_label)
    );

    for (i, s) in plot.series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let mut pts = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            if j > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.2},{:.2}", px(x), py(y));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{pts}"/>"#,
            PALETTE[i % PALETTE.len()]
        );
    }

    let labelled: Vec<(usize, &Series)> = plot.series.iter().enumerate().filter(|(_, s)| !s.label.is_empty()).collect();
    if labelled.len() > 1 {
        let _ = writeln!(out, r#"<g text-anchor="start">"#);
        for (row, (i, s)) in labelled.iter().enumerate() {
            let y = top + 16.0 + 16.0 * row as f64;
            let x = right - 130.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="{2}" stroke-width="2"/>"#,
                y - 4.0,
                x + 20.0,
                PALETTE[i % PALETTE.len()]
            );
            let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 26.0, escape(&s.label));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write(plot: &Plot, path: &Path) -> Result<(), SvgError> {
    let text = render(plot)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|p| {
                        let (a, b) = p.split_once(',').unwrap();
                        (a.parse().unwrap(), b.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_points_make_one_segment() {
        let svg = render(&Plot::new("t", "x", "y").with_series("", vec![(0.0, 0.0), (1.0, 2.0)])).unwrap();
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 1);
        let inner = HEIGHT - MARGIN_BOTTOM - MARGIN_TOP;
        let inset = inner * Y_PADDING / (1.0 + 2.0 * Y_PADDING);
        let round = |v: f64| (v * 100.0).round() / 100.0;
        assert_eq!(
            lines[0],
            vec![
                (MARGIN_LEFT, round(HEIGHT - MARGIN_BOTTOM - inset)),
                (WIDTH - MARGIN_RIGHT, round(MARGIN_TOP + inset))
            ]
        );
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(render(&Plot::new("t", "x", "y")), Err(SvgError::Empty)));
        assert!(matches!(render(&Plot::new("t", "x", "y").with_series("a", vec![])), Err(SvgError::Empty)));
    }

    #[test]
    fn non_finite_is_rejected() {
        let p = Plot::new("t", "x", "y").with_series("a", vec![(0.0, 1.0), (1.0, f64::NAN)]);
        assert!(matches!(render(&p), Err(SvgError::NonFinite { index: 1, .. })));
    }

    #[test]
    fn fixed_viewport_and_tick_labels() {
        let pts: Vec<(f64, f64)> = (0..=100).map(|i| (-0.5 + i as f64 / 100.0, (i as f64 / 10.0).sin())).collect();
        let svg = render(&Plot::new("a < b", "x", "re U").with_series("", pts)).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 500""#));
        assert!(svg.contains(">-0.4<") && svg.contains(">0.4<") && svg.contains(">0.0<"));
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains(">-0.0<"));
    }

    #[test]
    fn constant_series_still_renders() {
        let svg = render(&Plot::new("t", "x", "y").with_series("", vec![(0.0, 1.0), (1.0, 1.0)])).unwrap();
        let line = &polylines(&svg)[0];
        assert_eq!(line[0].1, line[1].1);
    }

    #[test]
    fn legend_only_for_several_labelled_series() {
        let one = render(&Plot::new("t", "x", "y").with_series("a", vec![(0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert!(!one.contains("text-anchor=\"start\""));
        let two = render(
            &Plot::new("t", "x", "y")
                .with_series("a", vec![(0.0, 0.0), (1.0, 1.0)])
                .with_series("b", vec![(0.0, 1.0), (1.0, 0.0)]),
        )
        .unwrap();
        assert!(two.contains(">a</text>") && two.contains(">b</text>"));
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(1.0, 6.0), 0.2);
        assert_eq!(tick_step(12.0, 6.0), 2.0);
        assert_eq!(tick_step(0.03, 6.0), 0.005);
        assert_eq!(label(-0.0, 2), "0.00");
        assert_eq!(label(-1e-17, 1), "0.0");
    }
}
