//! Minimal deterministic SVG emission for run-directory figures.
//!
//! Three figure kinds cover every command: line plots (profiles, front
//! trajectories), an outcome strip (classification vs speed), and a
//! heatmap (sweep error vs two axes). Everything is emitted as plain
//! strings with fixed-precision coordinates, so identical inputs produce
//! identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 66.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 38.0;
const MARGIN_B: f64 = 48.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One labeled polyline.
pub struct Curve<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Short human-readable number for tick and cell labels.
fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Affine map from a data interval onto a pixel interval.
struct Scale {
    d0: f64,
    d1: f64,
    p0: f64,
    p1: f64,
}

impl Scale {
    /// Widens degenerate data ranges so the map stays invertible.
    fn new(mut d0: f64, mut d1: f64, p0: f64, p1: f64) -> Scale {
        if !(d1 - d0).is_normal() {
            let pad = if d0 == 0.0 { 1.0 } else { d0.abs() * 0.5 };
            d0 -= pad;
            d1 += pad;
        }
        Scale { d0, d1, p0, p1 }
    }

    fn map(&self, v: f64) -> f64 {
        self.p0 + (v - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4).map(|i| self.d0 + (self.d1 - self.d0) * f64::from(i) / 4.0).collect()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, sx: &Scale, sy: &Scale, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = write!(
        out,
        "<path d=\"M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    );
    for t in sx.ticks() {
        let px = sx.map(t);
        let _ = write!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 5.0,
            y0 + 20.0,
            fmt_num(t)
        );
    }
    for t in sy.ticks() {
        let py = sy.map(t);
        let _ = write!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            fmt_num(t)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 10.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of one or more curves with shared axes and a legend.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let pts = || curves.iter().flat_map(|c| c.points.iter());
    let (mut dx0, mut dx1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut dy0, mut dy1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts() {
        dx0 = dx0.min(x);
        dx1 = dx1.max(x);
        dy0 = dy0.min(y);
        dy1 = dy1.max(y);
    }
    if !dx0.is_finite() {
        (dx0, dx1, dy0, dy1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = (dy1 - dy0) * 0.05;
    let sx = Scale::new(dx0, dx1, MARGIN_L, WIDTH - MARGIN_R);
    let sy = Scale::new(dy0 - pad, dy1 + pad, HEIGHT - MARGIN_B, MARGIN_T);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &sx, &sy, x_label, y_label);
    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        for &(x, y) in curve.points {
            let _ = write!(path, "{:.2},{:.2} ", sx.map(x), sy.map(y));
        }
        let _ = write!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.trim_end()
        );
        if !curve.label.is_empty() {
            let _ = write!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{color}\">{}</text>\n",
                WIDTH - MARGIN_R - 110.0,
                MARGIN_T + 16.0 * (k as f64 + 1.0),
                escape(curve.label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Horizontal strip of colored markers showing an outcome label per speed.
/// Colors are assigned to labels in order of first appearance.
pub fn outcome_strip(title: &str, rows: &[(f64, String)]) -> String {
    let (mut dx0, mut dx1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(c, _) in rows {
        dx0 = dx0.min(c);
        dx1 = dx1.max(c);
    }
    if !dx0.is_finite() {
        (dx0, dx1) = (0.0, 1.0);
    }
    let sx = Scale::new(dx0, dx1, MARGIN_L, WIDTH - MARGIN_R);
    let sy = Scale::new(0.0, 1.0, HEIGHT - MARGIN_B, MARGIN_T);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &sx, &sy, "wave speed", "");
    let mut legend: Vec<&str> = Vec::new();
    let band_top = (HEIGHT - MARGIN_B + MARGIN_T) / 2.0 - 30.0;
    for (c, label) in rows {
        let idx = match legend.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                legend.push(label);
                legend.len() - 1
            }
        };
        let color = PALETTE[idx % PALETTE.len()];
        let _ = write!(
            out,
            "<rect x=\"{:.2}\" y=\"{band_top:.2}\" width=\"6\" height=\"60\" fill=\"{color}\"/>\n",
            sx.map(*c) - 3.0
        );
    }
    for (i, label) in legend.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = MARGIN_T + 16.0 * (i as f64 + 1.0);
        let _ = write!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            MARGIN_L + 8.0,
            y - 9.0,
            MARGIN_L + 22.0,
            y,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap over labeled rows and columns; `None` cells render gray.
/// `cells[r][c]` pairs with `row_labels[r]` and `col_labels[c]`.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    col_labels: &[String],
    row_labels: &[String],
    cells: &[Vec<Option<f64>>],
) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in cells.iter().flatten().flatten() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi == lo {
        hi = lo + 1.0;
    }
    let ncols = col_labels.len().max(1) as f64;
    let nrows = row_labels.len().max(1) as f64;
    let cw = (WIDTH - MARGIN_L - MARGIN_R) / ncols;
    let ch = (HEIGHT - MARGIN_T - MARGIN_B) / nrows;
    for (r, row) in cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let x = MARGIN_L + cw * c as f64;
            let y = MARGIN_T + ch * r as f64;
            let fill = match cell {
                Some(v) => {
                    let t = (v - lo) / (hi - lo);
                    let ramp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
                    format!("#{:02x}{:02x}{:02x}", ramp(247.0, 8.0), ramp(251.0, 48.0), ramp(255.0, 107.0))
                }
                None => "#cccccc".to_string(),
            };
            let _ = write!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" \
                 fill=\"{fill}\" stroke=\"white\"/>\n"
            );
            if let Some(v) = cell {
                let dark = (v - lo) / (hi - lo) > 0.55;
                let _ = write!(
                    out,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
                    x + cw / 2.0,
                    y + ch / 2.0 + 4.0,
                    if dark { "white" } else { "black" },
                    fmt_num(*v)
                );
            }
        }
    }
    for (c, label) in col_labels.iter().enumerate() {
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + cw * (c as f64 + 0.5),
            HEIGHT - MARGIN_B + 18.0,
            escape(label)
        );
    }
    for (r, label) in row_labels.iter().enumerate() {
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 6.0,
            MARGIN_T + ch * (r as f64 + 0.5) + 4.0,
            escape(label)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 10.0,
        escape(x_label),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    out.push_str("</svg>\n");
    out
}
