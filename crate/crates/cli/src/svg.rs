//! Minimal SVG line plots of CSV series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use invdesign::io::read_numeric;

use crate::Failure;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_Y: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

pub struct Columns {
    pub x: String,
    pub y: String,
    pub split: Option<String>,
}

struct Series {
    label: String,
    segments: Vec<Vec<(f64, f64)>>,
}

fn column(header: Option<&[String]>, key: &str, path: &Path) -> Result<usize, Failure> {
    if let Ok(k) = key.parse::<usize>() {
        return Ok(k);
    }
    header
        .and_then(|h| h.iter().position(|c| c == key))
        .ok_or_else(|| Failure::Usage(format!("{}: no column named '{key}'", path.display())))
}

fn load(path: &Path, cols: &Columns) -> Result<Series, Failure> {
    let (header, rows) = read_numeric(path)?;
    let header = header.as_deref();
    let x = column(header, &cols.x, path)?;
    let y = column(header, &cols.y, path)?;
    let split = cols.split.as_deref().map(|s| column(header, s, path)).transpose()?;
    let width = rows.first().map_or(0, Vec::len);
    if let Some(&k) = [x, y].iter().chain(split.iter()).find(|&&k| k >= width) {
        return Err(Failure::Usage(format!("{}: column {k} out of range ({width} columns)", path.display())));
    }
    let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut key = None;
    for row in &rows {
        let k = split.map(|s| row[s].to_bits());
        if segments.is_empty() || k != key {
            segments.push(Vec::new());
            key = k;
        }
        segments.last_mut().unwrap().push((row[x], row[y]));
    }
    let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Series { label, segments })
}

/// Tick positions covering `[lo, hi]` with a 1-2-5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn label(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn render(series: &[Series], x_name: &str, y_name: &str, title: Option<&str>) -> String {
    let points = series.iter().flat_map(|s| s.segments.iter().flatten()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN_Y - (y - y0) / (y1 - y0) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = title {
        let _ = writeln!(out, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, MARGIN_LEFT + plot_w / 2.0, escape(t));
    }
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for x in ticks(x0, x1) {
        let px = sx(x);
        let base = HEIGHT - MARGIN_Y;
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{base}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, base + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, base + 18.0, label(x));
    }
    for y in ticks(y0, y1) {
        let py = sy(y);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/>"#, MARGIN_LEFT - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 8.0, py + 4.0, label(y));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + plot_w / 2.0, HEIGHT - 12.0, escape(x_name));
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_Y + plot_h / 2.0,
        MARGIN_Y + plot_h / 2.0,
        escape(y_name)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for seg in &s.segments {
            let pts: Vec<String> = seg
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        let ly = MARGIN_Y + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

pub fn plot(files: &[PathBuf], cols: &Columns, title: Option<&str>, output: &Path) -> Result<(), Failure> {
    if files.is_empty() {
        return Err(Failure::Usage("plot needs at least one series file".into()));
    }
    let series = files.iter().map(|f| load(f, cols)).collect::<Result<Vec<_>, _>>()?;
    let svg = render(&series, &cols.x, &cols.y, title);
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(output, svg).map_err(|e| Failure::Io(format!("{}: {e}", output.display())))?;
    println!("wrote {}", output.display());
    Ok(())
}
