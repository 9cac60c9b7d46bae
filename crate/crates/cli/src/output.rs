use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use anyhow::{ensure, Context};
use serde::Serialize;

use crate::sweep::ResultRow;

pub const CSV_HEADER: [&str; 11] = [
    "swept_var",
    "swept_value",
    "aoi_analytic",
    "aoi_empirical",
    "aoi_ci",
    "err_analytic",
    "err_empirical",
    "err_ci",
    "fp_rate",
    "fn_rate",
    "seed",
];

// `Display` for f64 is the shortest string that parses back to the same
// value and never switches to exponent notation.
fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn record(row: &ResultRow) -> [String; 11] {
    [
        row.swept_var.name().to_string(),
        num(row.swept_value),
        num(row.aoi_analytic),
        opt(row.aoi_empirical),
        opt(row.aoi_ci),
        num(row.err_analytic),
        opt(row.err_empirical),
        opt(row.err_ci),
        opt(row.fp_rate),
        opt(row.fn_rate),
        row.seed.to_string(),
    ]
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> anyhow::Result<()> {
    ensure!(!rows.is_empty(), "no rows to write to {}", path.display());
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<ResultRow>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let header = r.headers()?.clone();
    ensure!(
        header.iter().eq(CSV_HEADER),
        "{} has an unexpected header: {:?}",
        path.display(),
        header
    );
    r.deserialize()
        .map(|row| row.with_context(|| format!("bad row in {}", path.display())))
        .collect()
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_text(text: &str, path: &Path) -> anyhow::Result<()> {
    let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_numbers_stay_positional() {
        assert_eq!(num(1.5e-7), "0.00000015");
        assert_eq!(num(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(opt(None), "");
    }
}
