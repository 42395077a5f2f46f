//! Deterministic SVG emission: line plots for traces/spectra and a heatmap
//! for sweep surfaces. No styling dependencies; numbers are formatted with
//! fixed precision so identical inputs give byte-identical files.

use std::fmt::Write as _;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 50.0;

const SERIES_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

fn finite_min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn svg_header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    );
    for (v, label_x) in [(x_range.0, x0), (x_range.1, x1)] {
        let _ = writeln!(
            s,
            "<text x=\"{label_x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{v:.4e}</text>",
            y0 + 16.0
        );
    }
    for (v, label_y) in [(y_range.0, y0), (y_range.1, y1)] {
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{label_y:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.4e}</text>",
            x0 - 6.0
        );
    }
}

/// Multi-curve line plot.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x_lo, x_hi) = finite_min_max(series.iter().flat_map(|s| s.xs.iter().copied()));
    let (y_lo, y_hi) = finite_min_max(series.iter().flat_map(|s| s.ys.iter().copied()));
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);
        (px, py)
    };
    let mut s = svg_header(title);
    axes(&mut s, x_label, y_label, (x_lo, x_hi), (y_lo, y_hi));
    for (k, ser) in series.iter().enumerate() {
        let color = SERIES_COLORS[k % SERIES_COLORS.len()];
        let mut path = String::new();
        let mut started = false;
        for (&x, &y) in ser.xs.iter().zip(ser.ys.iter()) {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            let (px, py) = to_px(x, y);
            let _ = write!(path, "{}{px:.2},{py:.2} ", if started { "L" } else { "M" });
            started = true;
        }
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>",
            path.trim_end()
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            WIDTH - MARGIN_R - 170.0,
            MARGIN_T + 16.0 * (k as f64 + 1.0),
            xml_escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Blue-to-red ramp for the heatmap.
fn color_ramp(f: f64) -> String {
    let f = f.clamp(0.0, 1.0);
    let r = (255.0 * f).round() as u8;
    let g = (64.0 + 32.0 * (1.0 - (2.0 * f - 1.0).abs())).round() as u8;
    let b = (255.0 * (1.0 - f)).round() as u8;
    format!("rgb({r},{g},{b})")
}

/// Heatmap of a surface sampled on a rectangular grid; `values[i][j]`
/// corresponds to (`xs[i]`, `ys[j]`).
pub fn heatmap_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) -> String {
    let (lo, hi) = finite_min_max(values.iter().flat_map(|row| row.iter().copied()));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = svg_header(title);
    axes(
        &mut s,
        x_label,
        y_label,
        finite_min_max(xs.iter().copied()),
        finite_min_max(ys.iter().copied()),
    );
    let cell_w = (WIDTH - MARGIN_L - MARGIN_R) / xs.len() as f64;
    let cell_h = (HEIGHT - MARGIN_T - MARGIN_B) / ys.len() as f64;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let px = MARGIN_L + i as f64 * cell_w;
            let py = HEIGHT - MARGIN_B - (j as f64 + 1.0) * cell_h;
            let _ = writeln!(
                s,
                "<rect x=\"{px:.2}\" y=\"{py:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                cell_w + 0.5,
                cell_h + 0.5,
                color_ramp((v - lo) / span)
            );
        }
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">range [{lo:.4e}, {hi:.4e}]</text>",
        MARGIN_L,
        MARGIN_T - 6.0
    );
    s.push_str("</svg>\n");
    s
}
