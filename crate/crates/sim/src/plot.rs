//! Hand-written SVG trajectory plots.
//!
//! Polyline points are written in metres, exactly as logged; a single group
//! transform maps them onto the canvas with one scale for both axes, `x`
//! horizontal and `y` pointing up.

use std::fmt::Write as _;
use std::io::{self, Write};

use bauv_core::simcore::TrialLog;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const LEGEND_ROW: f64 = 18.0;
const COLORS: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One labelled trace.
pub struct Trace<'a> {
    pub label: String,
    pub log: &'a TrialLog,
}

fn bounds(reference: &[[f64; 2]], traces: &[Trace]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let pts = reference.iter().copied().chain(
        traces
            .iter()
            .flat_map(|t| t.log.rows.iter().map(|r| [r.x, r.y])),
    );
    for p in pts.filter(|p| p[0].is_finite() && p[1].is_finite()) {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if lo[0] > hi[0] {
        return ([0.0, 0.0], [1.0, 1.0]);
    }
    for k in 0..2 {
        if hi[k] - lo[k] < 1e-9 {
            lo[k] -= 0.5;
            hi[k] += 0.5;
        }
    }
    (lo, hi)
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn polyline(out: &mut String, points: impl Iterator<Item = [f64; 2]>, class: &str, color: &str) {
    let mut pts = String::new();
    for p in points {
        if !pts.is_empty() {
            pts.push(' ');
        }
        let _ = write!(pts, "{},{}", p[0], p[1]);
    }
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.5" vector-effect="non-scaling-stroke" points="{pts}"/>"#
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders the reference path and every trace into an SVG document.
pub fn render_svg(title: &str, reference: &[[f64; 2]], traces: &[Trace]) -> String {
    let (lo, hi) = bounds(reference, traces);
    let legend_h = LEGEND_ROW * (traces.len() + 1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN - legend_h;
    let scale = (plot_w / (hi[0] - lo[0])).min(plot_h / (hi[1] - lo[1]));
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let tx = MARGIN + 0.5 * plot_w - scale * cx;
    let ty = MARGIN + 0.5 * plot_h + scale * cy;
    let to_px = |x: f64, y: f64| (tx + scale * x, ty - scale * y);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let (x0, y0) = to_px(lo[0], lo[1]);
    let (x1, y1) = to_px(hi[0], hi[1]);
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y0 - y1
    );
    let mut g = String::new();
    let step = nice_step(hi[0] - lo[0]);
    let mut v = (lo[0] / step).ceil() * step;
    while v <= hi[0] + 1e-9 {
        let (px, _) = to_px(v, 0.0);
        let _ = writeln!(
            g,
            r##"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            y0 + 5.0,
            y0 + 18.0,
            tick_label(v)
        );
        v += step;
    }
    let step = nice_step(hi[1] - lo[1]);
    let mut v = (lo[1] / step).ceil() * step;
    while v <= hi[1] + 1e-9 {
        let (_, py) = to_px(0.0, v);
        let _ = writeln!(
            g,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(v)
        );
        v += step;
    }
    let _ = writeln!(
        s,
        r#"<g class="axes" font-family="sans-serif" font-size="11">{g}</g>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">x [m]</text>"#,
        (x0 + x1) / 2.0,
        y0 + 34.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 {:.2} {:.2})">y [m]</text>"#,
        x0 - 42.0,
        (y0 + y1) / 2.0,
        x0 - 42.0,
        (y0 + y1) / 2.0
    );

    let _ = writeln!(
        s,
        r#"<g class="data" transform="matrix({scale} 0 0 {} {tx} {ty})">"#,
        -scale
    );
    polyline(&mut s, reference.iter().copied(), "reference", "#000000");
    for (i, t) in traces.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        polyline(
            &mut s,
            t.log.rows.iter().map(|r| [r.x, r.y]),
            "trace",
            color,
        );
    }
    let _ = writeln!(s, "</g>");

    let mut ly = HEIGHT - MARGIN / 2.0 - legend_h + LEGEND_ROW;
    let entries = std::iter::once(("reference path".to_string(), "#000000")).chain(
        traces
            .iter()
            .enumerate()
            .map(|(i, t)| (t.label.clone(), COLORS[i % COLORS.len()])),
    );
    let _ = writeln!(
        s,
        r#"<g class="legend" font-family="sans-serif" font-size="12">"#
    );
    for (label, color) in entries {
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{}" y="{:.2}">{}</text>"#,
            ly - 4.0,
            MARGIN + 24.0,
            ly - 4.0,
            MARGIN + 30.0,
            ly,
            escape(&label)
        );
        ly += LEGEND_ROW;
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn tick_label(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

pub fn emit_plot<W: Write>(
    title: &str,
    reference: &[[f64; 2]],
    traces: &[Trace],
    mut out: W,
) -> io::Result<()> {
    out.write_all(render_svg(title, reference, traces).as_bytes())?;
    out.flush()
}
