use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sweep::SweepRow;

pub const CSV_HEADER: &str =
    "algorithm,problem,l,num_junk,neg_join,k,delta,max_depth,pop_size,avg_evaluations,success_rate,seed_base";

/// One CSV line. Field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub algorithm: String,
    pub problem: String,
    pub l: usize,
    pub num_junk: usize,
    pub neg_join: bool,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub max_depth: usize,
    pub pop_size: usize,
    pub avg_evaluations: f64,
    pub success_rate: f64,
    pub seed_base: u64,
}

impl From<&SweepRow> for CsvRecord {
    fn from(r: &SweepRow) -> Self {
        Self {
            algorithm: r.algorithm.to_string(),
            problem: r.problem.clone(),
            l: r.l,
            num_junk: r.num_junk,
            neg_join: r.neg_join,
            k: r.k,
            delta: r.delta,
            max_depth: r.max_depth,
            pop_size: r.pop_size,
            avg_evaluations: r.avg_evaluations,
            success_rate: r.success_rate,
            seed_base: r.seed_base,
        }
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(csv_err(path))?;
    }
    for row in rows {
        w.serialize(CsvRecord::from(row)).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<CsvRecord>, _>>()
        .map_err(csv_err(path))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Whole decades around the positive values in `values`.
fn decade_range(values: impl Iterator<Item = f64>) -> (i32, i32) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return (0, 1);
    }
    let (a, b) = (lo.floor() as i32, hi.ceil() as i32);
    if a == b {
        (a, a + 1)
    } else {
        (a, b)
    }
}

/// Log-log plot of `avg_evaluations` against `l` (or against the junk count
/// when `x_is_junk`), one polyline per series. Rows whose sizing gave up are
/// left out.
pub fn write_svg(rows: &[SweepRow], path: &Path, x_is_junk: bool) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let x_of = |r: &SweepRow| if x_is_junk { r.num_junk } else { r.l } as f64;
    let plotted: Vec<&SweepRow> = rows.iter().filter(|r| r.sized()).collect();

    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &plotted {
        let name = if x_is_junk {
            format!("{} (depth {})", r.algorithm.to_string().to_uppercase(), r.max_depth)
        } else {
            r.algorithm.to_string().to_uppercase()
        };
        series.entry(name).or_default().push((x_of(r), r.avg_evaluations));
    }

    let (x0, x1) = decade_range(plotted.iter().map(|r| x_of(r)));
    let (y0, y1) = decade_range(plotted.iter().map(|r| r.avg_evaluations));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x.log10() - f64::from(x0)) / f64::from(x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y.log10() - f64::from(y0)) / f64::from(y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for e in x0..=x1 {
        let x = sx(10f64.powi(e));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0
        );
    }
    for e in y0..=y1 {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let x_label = if x_is_junk { "junk terminals" } else { "problem size" };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">fitness evaluations</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 15.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    fs::write(path, s).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the CSV and the plot.
pub fn emit_report(rows: &[SweepRow], csv_path: &Path, svg_path: &Path, x_is_junk: bool) -> Result<()> {
    write_csv(rows, csv_path)?;
    write_svg(rows, svg_path, x_is_junk)
}
