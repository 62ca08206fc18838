use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
}

impl Cell {
    /// CSV text: integers as is, floats with 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Cell::Int(i) => *i as f64,
            Cell::Float(x) => *x,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { comments: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn svg_path(csv: &Path) -> PathBuf {
    csv.with_extension("svg")
}

/// Writes the table to `out` (stdout when absent) and, if asked, the chart.
pub fn emit(table: &Table, out: Option<&Path>, svg: Option<(&str, &str, &[&str])>) -> CliResult<()> {
    let csv = table.to_csv();
    match out {
        Some(path) => {
            write_file(path, &csv)?;
            if let Some((title, x, series)) = svg {
                write_file(&svg_path(path), &line_chart(table, title, x, series))?;
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line chart of `series` against column `x`. Each polyline carries the CSV
/// text of its points in `data-x` / `data-y`.
pub fn line_chart(table: &Table, title: &str, x: &str, series: &[&str]) -> String {
    let xi = table.column(x).expect("x column exists");
    let cols: Vec<usize> = series.iter().map(|s| table.column(s).expect("series column exists")).collect();
    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = table.rows.iter().map(|r| r[xi].value()).collect();
    let ys: Vec<f64> =
        cols.iter().flat_map(|&c| table.rows.iter().map(move |r| r[c].value())).filter(|v| finite(*v)).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>"#);
    let _ = writeln!(s, "</g>");
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ =
            writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, px(xv), bottom + 18.0, tick(xv));
        let _ =
            writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, py(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(x));
    for (k, (&c, name)) in cols.iter().zip(series).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let data_x: Vec<String> = table.rows.iter().map(|r| r[xi].render()).collect();
        let data_y: Vec<String> = table.rows.iter().map(|r| r[c].render()).collect();
        let points: Vec<String> = table
            .rows
            .iter()
            .filter(|r| finite(r[c].value()))
            .map(|r| format!("{:.2},{:.2}", px(r[xi].value()), py(r[c].value())))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-series="{}" data-x="{}" data-y="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(name),
            data_x.join(" "),
            data_y.join(" "),
            points.join(" ")
        );
        let ly = top + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            right - 150.0,
            right - 130.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, right - 124.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        format!("{:.4}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["N", "a", "b"]);
        t.comments.push("qphase test seed=0x5eed".into());
        t.rows.push(vec![Cell::Int(2), Cell::Float(0.1), Cell::Float(1.0 / 3.0)]);
        t.rows.push(vec![Cell::Int(3), Cell::Float(0.0), Cell::Float(-2.5)]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "# qphase test seed=0x5eed\nN,a,b\n2,1.0000000000000001e-1,3.3333333333333331e-1\n3,0.0000000000000000e0,-2.5000000000000000e0\n"
        );
        let back: f64 = "3.3333333333333331e-1".parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn chart_carries_csv_values() {
        let t = sample();
        let svg = line_chart(&t, "t", "N", &["a", "b"]);
        assert!(svg.contains(r#"data-series="b" data-x="2 3" data-y="3.3333333333333331e-1 -2.5000000000000000e0""#));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
