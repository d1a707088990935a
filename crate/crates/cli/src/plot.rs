//! The `plot` command: log-scale time series written as standalone SVG.

use std::fmt::Write;

use anyhow::{bail, Result};
use vlasov::prelude::*;

use crate::output::CSV_HEADER;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Value of a CSV column, or its error relative to the first record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Value(usize),
    Error(Invariant),
}

impl Quantity {
    pub fn parse(name: &str, error: bool) -> Result<Self> {
        if error {
            return Ok(Quantity::Error(crate::compare::parse_invariant(name)?));
        }
        match CSV_HEADER.iter().skip(1).position(|c| *c == name) {
            Some(i) => Ok(Quantity::Value(i + 1)),
            None => bail!("unknown quantity `{name}` (known: {})", CSV_HEADER[1..].join(", ")),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Quantity::Value(i) => format!("|{}|", CSV_HEADER[*i]),
            Quantity::Error(inv) => format!("error in {}", inv.name()),
        }
    }
}

fn column(r: &InvariantRecord, i: usize) -> f64 {
    [r.t, r.mass, r.current, r.kinetic, r.electric, r.total_energy, r.entropy, r.l1, r.l2, r.min_value][i]
}

/// Points `(t, y)` of `quantity`; values are plotted by magnitude.
pub fn extract(records: &[InvariantRecord], quantity: Quantity) -> Vec<(f64, f64)> {
    match quantity {
        Quantity::Value(i) => records.iter().map(|r| (r.t, column(r, i).abs())).collect(),
        Quantity::Error(inv) => {
            let e = error_series(records, ErrorOptions::default());
            e.t.iter().copied().zip(e.get(inv).iter().copied()).collect()
        }
    }
}

/// Maps data coordinates to pixels: linear in t, logarithmic in y.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub t_min: f64,
    pub t_max: f64,
    /// Decade exponents bounding the y-axis.
    pub lo: i32,
    pub hi: i32,
}

impl Frame {
    /// Smallest frame holding every positive finite point; `None` if there are none.
    pub fn fit(series: &[Series]) -> Option<Self> {
        let pts = || series.iter().flat_map(|s| s.points.iter()).filter(|p| plottable(**p));
        let t_min = pts().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let t_max = pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let y_min = pts().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let y_max = pts().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        if !t_min.is_finite() {
            return None;
        }
        let lo = y_min.log10().floor() as i32;
        let hi = (y_max.log10().ceil() as i32).max(lo + 1);
        let t_max = if t_max > t_min { t_max } else { t_min + 1.0 };
        Some(Self { t_min, t_max, lo, hi })
    }

    pub fn map(&self, t: f64, y: f64) -> (f64, f64) {
        let px = LEFT + (t - self.t_min) / (self.t_max - self.t_min) * (WIDTH - LEFT - RIGHT);
        let frac = (y.log10() - self.lo as f64) / (self.hi - self.lo) as f64;
        let py = HEIGHT - BOTTOM - frac * (HEIGHT - TOP - BOTTOM);
        (px, py)
    }
}

fn plottable((t, y): (f64, f64)) -> bool {
    t.is_finite() && y.is_finite() && y > 0.0
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series on one log-scale axis. Non-positive values are skipped.
pub fn render_svg(series: &[Series], title: &str, y_label: &str) -> Result<String> {
    let Some(frame) = Frame::fit(series) else {
        bail!("nothing to plot: every series is empty or has no positive values");
    };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#)?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title))?;
    let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
    let (x1, y1) = (WIDTH - RIGHT, TOP);
    writeln!(s, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1)?;
    let step = ((frame.hi - frame.lo) as f64 / 8.0).ceil().max(1.0) as i32;
    for k in (frame.lo..=frame.hi).step_by(step as usize) {
        let (_, py) = frame.map(frame.t_min, 10f64.powi(k));
        writeln!(s, r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#ddd"/>"##)?;
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{k}</text>"#, x0 - 6.0, py + 4.0)?;
    }
    for i in 0..=5 {
        let t = frame.t_min + (frame.t_max - frame.t_min) * i as f64 / 5.0;
        let (px, _) = frame.map(t, 1.0);
        writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 18.0, trim(t))?;
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, (x0 + x1) / 2.0, HEIGHT - 10.0)?;
    writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    )?;
    for (n, series) in series.iter().enumerate() {
        let color = COLORS[n % COLORS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| plottable(**p))
            .map(|&(t, y)| {
                let (px, py) = frame.map(t, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        if !pts.is_empty() {
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, pts.join(" "))?;
        }
        let ly = y1 + 16.0 + 16.0 * n as f64;
        writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, x1 - 150.0, x1 - 130.0)?;
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x1 - 125.0, ly + 4.0, escape(&series.label))?;
    }
    writeln!(s, "</svg>")?;
    Ok(s)
}

fn trim(t: f64) -> String {
    let s = format!("{t:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
