//! Self-contained SVG figures with sidecar CSVs holding the exact plotted
//! numbers. All coordinates and values print with six decimals so
//! identical inputs always produce identical bytes.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hydrodata::clean::quantile_linear;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A rendered figure: the SVG document and the CSV that regenerates it.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub svg: String,
    pub csv: String,
}

impl Plot {
    /// Writes `<stem>.svg` and `<stem>.csv` next to each other.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let write = |path: std::path::PathBuf, content: &str| {
            std::fs::write(&path, content).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })
        };
        write(dir.join(format!("{stem}.svg")), &self.svg)?;
        write(dir.join(format!("{stem}.csv")), &self.csv)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn of(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut frame = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            frame.x_min = frame.x_min.min(x);
            frame.x_max = frame.x_max.max(x);
            frame.y_min = frame.y_min.min(y);
            frame.y_max = frame.y_max.max(y);
        }
        // Degenerate ranges widen so single values still land mid-axis.
        if frame.x_min == frame.x_max {
            frame.x_min -= 0.5;
            frame.x_max += 0.5;
        }
        if frame.y_min == frame.y_max {
            frame.y_min -= 0.5;
            frame.y_max += 0.5;
        }
        frame
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.6}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"18\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    out.push_str(&format!(
        "<line x1=\"{x0:.6}\" y1=\"{y0:.6}\" x2=\"{x1:.6}\" y2=\"{y0:.6}\" stroke=\"black\"/>\n\
         <line x1=\"{x0:.6}\" y1=\"{y0:.6}\" x2=\"{x0:.6}\" y2=\"{y1:.6}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let t = f64::from(i) / 4.0;
        let xv = frame.x_min + t * (frame.x_max - frame.x_min);
        let yv = frame.y_min + t * (frame.y_max - frame.y_min);
        let xs = frame.sx(xv);
        let ys = frame.sy(yv);
        out.push_str(&format!(
            "<line x1=\"{xs:.6}\" y1=\"{y0:.6}\" x2=\"{xs:.6}\" y2=\"{:.6}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{xs:.6}\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"11\">{xv:.6}</text>\n",
            y0 + 20.0
        ));
        out.push_str(&format!(
            "<line x1=\"{:.6}\" y1=\"{ys:.6}\" x2=\"{x0:.6}\" y2=\"{ys:.6}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.6}\" y=\"{:.6}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"11\">{yv:.6}</text>\n",
            x0 - 8.0,
            ys + 4.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.6}\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 18 {:.6})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    ));
    out
}

/// Multi-series line chart. Series with few points also get circle
/// markers so isolated samples stay visible.
pub fn line_plot(series: &[Series], title: &str, x_label: &str, y_label: &str) -> Result<Plot> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::EmptyInput);
    }
    for s in series {
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Config(format!("non-finite point in series `{}`", s.name)));
        }
    }
    let frame = Frame::of(series.iter().flat_map(|s| s.points.iter().copied()));
    let mut svg = svg_open(title);
    svg.push_str(&axes(&frame, x_label, y_label));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() > 1 {
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|(x, y)| format!("{:.6},{:.6}", frame.sx(*x), frame.sy(*y)))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
        if s.points.len() <= 64 {
            for (x, y) in &s.points {
                svg.push_str(&format!(
                    "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"3\" fill=\"{color}\"/>\n",
                    frame.sx(*x),
                    frame.sy(*y)
                ));
            }
        }
        svg.push_str(&format!(
            "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.6}\" y=\"{:.6}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN - 150.0,
            MARGIN + 20.0 * i as f64,
            WIDTH - MARGIN - 132.0,
            MARGIN + 10.0 + 20.0 * i as f64,
            escape(&s.name)
        ));
    }
    svg.push_str("</svg>\n");

    let mut csv = String::from("series,x,y\n");
    for s in series {
        for (x, y) in &s.points {
            csv.push_str(&format!("{},{x:.6},{y:.6}\n", s.name));
        }
    }
    Ok(Plot { svg, csv })
}

/// Equal-width histogram; the top edge of the last bin is inclusive.
pub fn histogram_plot(values: &[f64], bins: usize, title: &str, x_label: &str) -> Result<Plot> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("histogram values must be finite".into()));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let width = span / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let index = (((v - min) / width) as usize).min(bins - 1);
        counts[index] += 1;
    }
    let top = *counts.iter().max().unwrap() as f64;
    let frame = Frame {
        x_min: min,
        x_max: min + span,
        y_min: 0.0,
        y_max: top,
    };
    let mut svg = svg_open(title);
    svg.push_str(&axes(&frame, x_label, "count"));
    for (i, &count) in counts.iter().enumerate() {
        let lo = min + i as f64 * width;
        let x = frame.sx(lo);
        let x_next = frame.sx(lo + width);
        let y = frame.sy(count as f64);
        let base = frame.sy(0.0);
        svg.push_str(&format!(
            "<rect x=\"{x:.6}\" y=\"{y:.6}\" width=\"{:.6}\" height=\"{:.6}\" \
             fill=\"#1f77b4\" stroke=\"white\"/>\n",
            x_next - x,
            base - y
        ));
    }
    svg.push_str("</svg>\n");

    let mut csv = String::from("bin_lo,bin_hi,count\n");
    for (i, &count) in counts.iter().enumerate() {
        let lo = min + i as f64 * width;
        csv.push_str(&format!("{lo:.6},{:.6},{count}\n", lo + width));
    }
    Ok(Plot { svg, csv })
}

/// Tukey boxplots, one per named group: box at the quartiles, whiskers at
/// the most extreme values inside the 1.5×IQR fences, dots beyond.
pub fn box_plot(groups: &[(String, Vec<f64>)], title: &str, y_label: &str) -> Result<Plot> {
    if groups.is_empty() || groups.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::EmptyInput);
    }
    struct BoxStats {
        q1: f64,
        median: f64,
        q3: f64,
        whisker_lo: f64,
        whisker_hi: f64,
        outliers: Vec<f64>,
    }
    let mut stats = Vec::new();
    for (name, values) in groups {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite value in group `{name}`")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q1 = quantile_linear(&sorted, 0.25);
        let median = quantile_linear(&sorted, 0.5);
        let q3 = quantile_linear(&sorted, 0.75);
        let iqr = q3 - q1;
        let lo_fence = q1 - 1.5 * iqr;
        let hi_fence = q3 + 1.5 * iqr;
        let whisker_lo = sorted.iter().cloned().find(|&v| v >= lo_fence).unwrap_or(q1);
        let whisker_hi = sorted
            .iter()
            .rev()
            .cloned()
            .find(|&v| v <= hi_fence)
            .unwrap_or(q3);
        let outliers: Vec<f64> = sorted
            .iter()
            .cloned()
            .filter(|&v| v < lo_fence || v > hi_fence)
            .collect();
        stats.push(BoxStats {
            q1,
            median,
            q3,
            whisker_lo,
            whisker_hi,
            outliers,
        });
    }
    let y_min = stats
        .iter()
        .map(|s| s.outliers.iter().cloned().fold(s.whisker_lo, f64::min))
        .fold(f64::INFINITY, f64::min);
    let y_max = stats
        .iter()
        .map(|s| s.outliers.iter().cloned().fold(s.whisker_hi, f64::max))
        .fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x_min: 0.0,
        x_max: groups.len() as f64,
        y_min: if y_min == y_max { y_min - 0.5 } else { y_min },
        y_max: if y_min == y_max { y_max + 0.5 } else { y_max },
    };
    let mut svg = svg_open(title);
    svg.push_str(&axes(&frame, "", y_label));
    for (i, ((name, _), s)) in groups.iter().zip(&stats).enumerate() {
        let center = frame.sx(i as f64 + 0.5);
        let half = (WIDTH - 2.0 * MARGIN) / groups.len() as f64 * 0.25;
        let draw_h = |y: f64, hw: f64| {
            format!(
                "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"black\"/>\n",
                center - hw,
                frame.sy(y),
                center + hw,
                frame.sy(y)
            )
        };
        svg.push_str(&format!(
            "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"none\" \
             stroke=\"black\"/>\n",
            center - half,
            frame.sy(s.q3),
            2.0 * half,
            frame.sy(s.q1) - frame.sy(s.q3)
        ));
        svg.push_str(&draw_h(s.median, half));
        svg.push_str(&draw_h(s.whisker_lo, half * 0.6));
        svg.push_str(&draw_h(s.whisker_hi, half * 0.6));
        svg.push_str(&format!(
            "<line x1=\"{center:.6}\" y1=\"{:.6}\" x2=\"{center:.6}\" y2=\"{:.6}\" \
             stroke=\"black\"/>\n",
            frame.sy(s.whisker_lo),
            frame.sy(s.q1)
        ));
        svg.push_str(&format!(
            "<line x1=\"{center:.6}\" y1=\"{:.6}\" x2=\"{center:.6}\" y2=\"{:.6}\" \
             stroke=\"black\"/>\n",
            frame.sy(s.q3),
            frame.sy(s.whisker_hi)
        ));
        for &v in &s.outliers {
            svg.push_str(&format!(
                "<circle cx=\"{center:.6}\" cy=\"{:.6}\" r=\"2.5\" fill=\"none\" \
                 stroke=\"black\"/>\n",
                frame.sy(v)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{center:.6}\" y=\"{:.6}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            HEIGHT - MARGIN + 20.0,
            escape(name)
        ));
    }
    svg.push_str("</svg>\n");

    let mut csv = String::from("group,q1,median,q3,whisker_lo,whisker_hi,outlier_count\n");
    for ((name, _), s) in groups.iter().zip(&stats) {
        csv.push_str(&format!(
            "{name},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            s.q1,
            s.median,
            s.q3,
            s.whisker_lo,
            s.whisker_hi,
            s.outliers.len()
        ));
    }
    Ok(Plot { svg, csv })
}
