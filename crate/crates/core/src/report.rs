//! Text and vector-graphic output: CSV tables, binned histograms and small
//! standalone SVG plots.
//!
//! Everything here renders through deterministic formatting, so a rerun
//! with identical inputs reproduces identical bytes.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;

/// Formats with 17 significant digits, enough to reconstruct the exact
/// binary value.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV builder with a fixed column count.
#[derive(Debug, Clone)]
pub struct Table {
    columns: usize,
    buf: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            columns: header.len(),
            buf: format!("{}\n", header.join(",")),
        }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "row width mismatch");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn push_numbers(&mut self, cells: &[f64]) {
        let formatted: Vec<String> = cells.iter().map(|&x| full_precision(x)).collect();
        self.push_row(&formatted);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Integer-binned histogram over a fixed range; samples outside the range
/// are dropped and reported in `clipped`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: u64,
    pub clipped: u64,
}

pub fn histogram(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::Invalid("histogram needs at least one bin".into()));
    }
    if !(range.0 < range.1) {
        return Err(Error::Invalid(format!(
            "histogram range ({}, {}) must be ordered",
            range.0, range.1
        )));
    }
    let width = (range.1 - range.0) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| range.0 + k as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    let mut clipped = 0u64;
    for &v in values {
        if v < range.0 || v > range.1 || !v.is_finite() {
            clipped += 1;
            continue;
        }
        let k = (((v - range.0) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        samples: values.len() as u64,
        clipped,
    })
}

impl Histogram {
    /// The histogram as a two-column CSV of bin edges and counts.
    pub fn to_csv(&self) -> String {
        let mut table = Table::new(&["bin_lo", "bin_hi", "count"]);
        for (k, &c) in self.counts.iter().enumerate() {
            table.push_row(&[
                full_precision(self.edges[k]),
                full_precision(self.edges[k + 1]),
                c.to_string(),
            ]);
        }
        table.finish()
    }
}

/// One plotted curve.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn around(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for (px, py) in points {
            x.0 = x.0.min(px);
            x.1 = x.1.max(px);
            y.0 = y.0.min(py);
            y.1 = y.1.max(py);
        }
        for r in [&mut x, &mut y] {
            if !(r.0 < r.1) {
                let c = if r.0.is_finite() { r.0 } else { 0.0 };
                *r = (c - 1.0, c + 1.0);
            }
            let pad = 0.05 * (r.1 - r.0);
            *r = (r.0 - pad, r.1 + pad);
        }
        Frame { x, y }
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        let sx = (WIDTH - 2.0 * MARGIN) / (self.x.1 - self.x.0);
        let sy = (HEIGHT - 2.0 * MARGIN) / (self.y.1 - self.y.0);
        (
            MARGIN + (p.0 - self.x.0) * sx,
            HEIGHT - MARGIN - (p.1 - self.y.0) * sy,
        )
    }
}

fn svg_open(buf: &mut String, title: &str) {
    let _ = write!(
        buf,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

fn svg_axes(buf: &mut String, frame: &Frame) {
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    let _ = write!(
        buf,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    let labels = [
        (x0, y0 + 18.0, frame.x.0, "middle"),
        (x1, y0 + 18.0, frame.x.1, "middle"),
        (x0 - 8.0, y0, frame.y.0, "end"),
        (x0 - 8.0, y1, frame.y.1, "end"),
    ];
    for (x, y, v, anchor) in labels {
        let _ = writeln!(
            buf,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" \
             font-family=\"sans-serif\" font-size=\"11\">{v:.4}</text>"
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders curves as polylines with a shared frame, legend and axis range
/// labels.
pub fn polyline_svg(title: &str, series: &[Series<'_>]) -> String {
    let frame = Frame::around(series.iter().flat_map(|s| s.points.iter().copied()));
    let mut buf = String::new();
    svg_open(&mut buf, title);
    svg_axes(&mut buf, &frame);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        for &p in s.points {
            let (x, y) = frame.map(p);
            let _ = write!(path, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            buf,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
        let ly = MARGIN + 16.0 * k as f64;
        let _ = write!(
            buf,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"3\"/>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN - 140.0,
            WIDTH - MARGIN - 116.0,
            WIDTH - MARGIN - 110.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    buf.push_str("</svg>\n");
    buf
}

/// Renders a histogram as filled bars.
pub fn histogram_svg(title: &str, hist: &Histogram) -> String {
    let top = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let frame = Frame {
        x: (hist.edges[0], *hist.edges.last().expect("non-empty edges")),
        y: (0.0, top * 1.05),
    };
    let mut buf = String::new();
    svg_open(&mut buf, title);
    svg_axes(&mut buf, &frame);
    for (k, &c) in hist.counts.iter().enumerate() {
        let (x_lo, y_top) = frame.map((hist.edges[k], c as f64));
        let (x_hi, y_base) = frame.map((hist.edges[k + 1], 0.0));
        let _ = writeln!(
            buf,
            "<rect x=\"{x_lo:.2}\" y=\"{y_top:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"{}\" stroke=\"white\" stroke-width=\"0.5\"/>",
            x_hi - x_lo,
            y_base - y_top,
            PALETTE[0]
        );
    }
    buf.push_str("</svg>\n");
    buf
}
