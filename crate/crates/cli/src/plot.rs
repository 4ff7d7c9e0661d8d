//! Minimal self-contained SVG line charts with a log-scaled x axis.
//!
//! Output is a plain string built with fixed-precision formatting, so a
//! given input always renders to identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// One polyline: (λ, value) points on a log-x chart.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

/// Render the chart. Points with non-positive λ or non-finite values are
/// dropped (the x axis is logarithmic).
pub fn render(title: &str, y_label: &str, series: &[Series]) -> Option<String> {
    let mut xs: Vec<f64> = Vec::new();
    let mut ymax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x > 0.0 && y.is_finite() {
                xs.push(x.log10());
                ymax = ymax.max(y);
                ymin = ymin.min(y);
            }
        }
    }
    if xs.is_empty() {
        return None;
    }
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let xspan = (xmax - xmin).max(1e-9);
    let ymin = ymin.min(0.0);
    let yspan = (ymax - ymin).max(1e-12);
    let ymax = ymax + 0.05 * yspan;
    let yspan = (ymax - ymin).max(1e-12);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |lx: f64| MARGIN_LEFT + (lx - xmin) / xspan * plot_w;
    let to_y = |y: f64| MARGIN_TOP + (1.0 - (y - ymin) / yspan) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // Frame.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN_LEFT:.2}\" y=\"{MARGIN_TOP:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" fill=\"none\" stroke=\"#333\"/>"
    );

    // Decade ticks on the log x axis.
    let k0 = xmin.ceil() as i64;
    let k1 = xmax.floor() as i64;
    for k in k0..=k1 {
        let x = to_x(k as f64);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{MARGIN_TOP:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>",
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            MARGIN_TOP + plot_h + 18.0,
            format_pow10(k)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">lambda (log scale)</text>",
        MARGIN_LEFT + plot_w / 2.0,
        MARGIN_TOP + plot_h + 40.0
    );

    // Horizontal ticks.
    let step = nice_step(yspan);
    let mut tick = (ymin / step).ceil() * step;
    while tick <= ymax {
        let y = to_y(tick);
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_LEFT:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#eee\"/>",
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 6.0,
            y + 4.0,
            trim_float(tick)
        );
        tick += step;
    }
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    );

    // Series.
    for s in series {
        let mut path = String::new();
        for &(x, y) in &s.points {
            if x <= 0.0 || !y.is_finite() {
                continue;
            }
            if path.is_empty() {
                let _ = write!(path, "M");
            } else {
                let _ = write!(path, " L");
            }
            let _ = write!(path, "{:.2} {:.2}", to_x(x.log10()), to_y(y));
        }
        if path.is_empty() {
            continue;
        }
        let dash = if s.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{dash}/>",
            s.color
        );
    }

    // Legend.
    let lx = MARGIN_LEFT + plot_w + 12.0;
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 + i as f64 * 20.0;
        let dash = if s.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            "<line x1=\"{lx:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{}\" stroke-width=\"1.8\"{dash}/>",
            lx + 24.0,
            s.color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            lx + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn format_pow10(k: i64) -> String {
    if (-3..=3).contains(&k) {
        trim_float(10f64.powi(k as i32))
    } else {
        format!("1e{k}")
    }
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}
