//! Minimal line charts. Output depends only on the input rows, so equal
//! input gives byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::ensure;

use crate::output::write_text;
use crate::sweep::ResultRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Numeric CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    SweptValue,
    AoiAnalytic,
    AoiEmpirical,
    AoiCi,
    ErrAnalytic,
    ErrEmpirical,
    ErrCi,
    FpRate,
    FnRate,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::SweptValue => "swept_value",
            Column::AoiAnalytic => "aoi_analytic",
            Column::AoiEmpirical => "aoi_empirical",
            Column::AoiCi => "aoi_ci",
            Column::ErrAnalytic => "err_analytic",
            Column::ErrEmpirical => "err_empirical",
            Column::ErrCi => "err_ci",
            Column::FpRate => "fp_rate",
            Column::FnRate => "fn_rate",
        }
    }

    pub fn value(self, row: &ResultRow) -> Option<f64> {
        match self {
            Column::SweptValue => Some(row.swept_value),
            Column::AoiAnalytic => Some(row.aoi_analytic),
            Column::AoiEmpirical => row.aoi_empirical,
            Column::AoiCi => row.aoi_ci,
            Column::ErrAnalytic => Some(row.err_analytic),
            Column::ErrEmpirical => row.err_empirical,
            Column::ErrCi => row.err_ci,
            Column::FpRate => row.fp_rate,
            Column::FnRate => row.fn_rate,
        }
    }

    /// Simulated columns are drawn dashed with point markers.
    pub fn is_empirical(self) -> bool {
        !matches!(
            self,
            Column::SweptValue | Column::AoiAnalytic | Column::ErrAnalytic
        )
    }
}

/// One curve: `y` plotted against `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Series {
    pub x: Column,
    pub y: Column,
}

struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            lo -= pad;
            hi += pad;
        }
        Scale { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..TICKS).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
    }

    fn label(&self, v: f64) -> String {
        let decimals = (2.0 - (self.hi - self.lo).log10().floor()).clamp(0.0, 8.0) as usize;
        format!("{v:.decimals$}")
    }
}

fn axis_label(columns: impl Iterator<Item = Column>) -> String {
    let mut names: Vec<&str> = Vec::new();
    for c in columns {
        if !names.contains(&c.name()) {
            names.push(c.name());
        }
    }
    names.join(" / ")
}

/// Renders `series` over `rows` as a standalone SVG document.
pub fn svg_document(rows: &[ResultRow], series: &[Series]) -> anyhow::Result<String> {
    ensure!(
        rows.len() >= 2,
        "a chart needs at least two rows, got {}",
        rows.len()
    );
    ensure!(!series.is_empty(), "no series to draw");
    let points: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            rows.iter()
                .filter_map(|r| Some((s.x.value(r)?, s.y.value(r)?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    ensure!(
        points.iter().any(|p| !p.is_empty()),
        "every series is empty"
    );

    let xs = Scale::new(points.iter().flatten().map(|p| p.0), LEFT, WIDTH - RIGHT);
    let ys = Scale::new(points.iter().flatten().map(|p| p.1), HEIGHT - BOTTOM, TOP);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    writeln!(
        w,
        r#"<path d="M{x0},{y1} V{y0} H{x1}" fill="none" stroke="black"/>"#
    )?;
    for t in xs.ticks() {
        let px = xs.map(t);
        writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        )?;
        writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            xs.label(t)
        )?;
    }
    for t in ys.ticks() {
        let py = ys.map(t);
        writeln!(
            w,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            ys.label(t)
        )?;
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 15.0,
        axis_label(series.iter().map(|s| s.x))
    )?;
    let cy = 0.5 * (y0 + y1);
    writeln!(
        w,
        r#"<text x="20" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 20 {cy:.2})">{}</text>"#,
        axis_label(series.iter().map(|s| s.y))
    )?;

    for (i, (s, pts)) in series.iter().zip(&points).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = if s.y.is_empirical() {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", xs.map(x), ys.map(y)))
            .collect();
        writeln!(
            w,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            coords.join(" ")
        )?;
        if s.y.is_empirical() {
            for &(x, y) in pts {
                writeln!(
                    w,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    xs.map(x),
                    ys.map(y)
                )?;
            }
        }
        let ly = TOP + 16.0 * (i as f64 + 1.0);
        let lx = x1 - 150.0;
        writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            ly - 4.0,
            lx + 24.0,
            ly - 4.0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 30.0,
            s.y.name()
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(svg)
}

/// Chart of each `y` column against `x`.
pub fn render_svg(rows: &[ResultRow], x: Column, ys: &[Column], path: &Path) -> anyhow::Result<()> {
    let series: Vec<Series> = ys.iter().map(|&y| Series { x, y }).collect();
    render_series_svg(rows, &series, path)
}

pub fn render_series_svg(rows: &[ResultRow], series: &[Series], path: &Path) -> anyhow::Result<()> {
    write_text(&svg_document(rows, series)?, path)
}
