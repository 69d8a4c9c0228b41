//! Minimal hand-rolled SVG line charts for log-log error curves. CSV is the
//! canonical output; these exist so a run can be eyeballed without tooling.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub struct Series {
    pub label: String,
    /// (n, error) pairs; both must be positive, plotted on log10 axes.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const COLORS: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

pub fn render_line_chart(title: &str, series: &[Series]) -> Result<String> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if x <= 0.0 || y <= 0.0 {
                return Err(Error::Input(format!("chart values must be positive, got ({x}, {y})")));
            }
            xs.push(x.log10());
            ys.push(y.log10());
        }
    }
    if xs.is_empty() {
        return Err(Error::Input("chart needs at least one point".into()));
    }
    let (x_lo, x_hi) = padded_bounds(&xs);
    let (y_lo, y_hi) = padded_bounds(&ys);
    let to_px = |x: f64, y: f64| {
        let px = MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);
        (px, py)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    // Axes.
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.1}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B
    );
    // Tick labels at the data decades.
    for tick in ticks(x_lo, x_hi) {
        let (px, _) = to_px(tick, y_lo);
        let _ = writeln!(
            out,
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.3}</text>",
            HEIGHT - MARGIN_B + 16.0,
            tick
        );
    }
    for tick in ticks(y_lo, y_hi) {
        let (_, py) = to_px(x_lo, tick);
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
            MARGIN_L - 6.0,
            tick
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">log10 n</text>",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">log10 error</text>",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            let (px, py) = to_px(x.log10(), y.log10());
            let _ = write!(path, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.trim_end()
        );
        for &(x, y) in &s.points {
            let (px, py) = to_px(x.log10(), y.log10());
            let _ = writeln!(out, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"2.5\" fill=\"{color}\"/>");
        }
        // Legend entry.
        let ly = MARGIN_T + 14.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            WIDTH - MARGIN_R - 140.0,
            WIDTH - MARGIN_R - 120.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            WIDTH - MARGIN_R - 114.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn padded_bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = (hi - lo) / 4.0;
    (0..=4).map(|i| lo + step * i as f64).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
