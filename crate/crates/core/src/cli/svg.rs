//! Minimal SVG scatter plots: side-by-side panels sharing both axes.

use std::fmt::Write;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 340.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

pub struct Panel<'a> {
    pub title: &'a str,
    pub points: &'a [(f64, f64)],
}

pub struct Axes<'a> {
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    /// Vertical dashed guide.
    pub x_guide: Option<f64>,
    /// Horizontal dashed guide.
    pub y_guide: Option<f64>,
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= raw {
            return m * mag;
        }
    }
    10.0 * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the panels left to right. The y range covers every point and
/// the y guide, padded by 5%.
pub fn scatter_panels_svg(panels: &[Panel<'_>], axes: &Axes<'_>) -> String {
    let ys = panels
        .iter()
        .flat_map(|p| p.points.iter().map(|&(_, y)| y))
        .chain(axes.y_guide)
        .filter(|y| y.is_finite());
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = (y1 - y0) * 0.05;
    let (y0, y1) = (y0 - pad, y1 + pad);
    let (x0, x1) = axes.x_range;

    let width = PANEL_W * panels.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" viewBox="0 0 {width} {PANEL_H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{PANEL_H}" fill="white"/>"#);

    let plot_w = PANEL_W - LEFT - RIGHT;
    let plot_h = PANEL_H - TOP - BOTTOM;
    for (i, panel) in panels.iter().enumerate() {
        let ox = i as f64 * PANEL_W + LEFT;
        let px = |x: f64| ox + (x - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

        let _ = writeln!(s, r#"<g class="panel" id="panel-{i}">"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
            ox + plot_w / 2.0,
            TOP - 16.0,
            escape(panel.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{ox:.1}" y="{TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333"/>"##
        );

        let step = tick_step(x1 - x0);
        let mut t = (x0 / step).ceil() * step;
        while t <= x1 + 1e-9 {
            let x = px(t);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
                TOP + plot_h,
                TOP + plot_h + 4.0,
                TOP + plot_h + 16.0,
                trim_number(t)
            );
            t += step;
        }
        let step = tick_step(y1 - y0);
        let mut t = (y0 / step).ceil() * step;
        while t <= y1 + 1e-9 {
            let y = py(t);
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{ox:.1}" y2="{y:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                ox - 4.0,
                ox - 6.0,
                y + 4.0,
                trim_number(t)
            );
            t += step;
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            ox + plot_w / 2.0,
            PANEL_H - 12.0,
            escape(axes.x_label)
        );
        let (lx, ly) = (ox - 46.0, TOP + plot_h / 2.0);
        let _ = writeln!(
            s,
            r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="middle" transform="rotate(-90 {lx:.1} {ly:.1})">{}</text>"#,
            escape(axes.y_label)
        );

        for &(x, y) in panel.points {
            if x.is_finite() && y.is_finite() {
                let _ = writeln!(
                    s,
                    r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f77b4" fill-opacity="0.6"/>"##,
                    px(x),
                    py(y)
                );
            }
        }
        if let Some(g) = axes.x_guide {
            let x = px(g);
            let _ = writeln!(
                s,
                r##"<line class="guide-x" x1="{x:.1}" y1="{TOP:.1}" x2="{x:.1}" y2="{:.1}" stroke="#d62728" stroke-dasharray="5,4"/>"##,
                TOP + plot_h
            );
        }
        if let Some(g) = axes.y_guide {
            let y = py(g);
            let _ = writeln!(
                s,
                r##"<line class="guide-y" x1="{ox:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#2ca02c" stroke-dasharray="5,4"/>"##,
                ox + plot_w
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn trim_number(v: f64) -> String {
    let v = if v.abs() < 1e-9 { 0.0 } else { v };
    let text = format!("{v:.2}");
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(7.0), 2.0);
        assert_eq!(tick_step(12.0), 2.5);
        assert_eq!(trim_number(0.5), "0.5");
        assert_eq!(trim_number(-2.0), "-2");
        assert_eq!(trim_number(-1e-12), "0");
    }

    #[test]
    fn panels_points_and_guides() {
        let a = [(0.1, -1.0), (0.9, -3.0)];
        let b = [(0.5, 0.0)];
        let svg = scatter_panels_svg(
            &[Panel { title: "left", points: &a }, Panel { title: "a<b", points: &b }],
            &Axes {
                x_label: "x",
                y_label: "y",
                x_range: (0.0, 1.0),
                x_guide: Some(0.5),
                y_guide: Some(-2.0),
            },
        );
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
        assert_eq!(svg.matches(r#"class="point""#).count(), 3);
        assert_eq!(svg.matches("guide-x").count(), 2);
        assert_eq!(svg.matches("guide-y").count(), 2);
        assert!(svg.contains("a&lt;b"));
        // x = 0.5 sits halfway across the first plot area
        let mid = LEFT + (PANEL_W - LEFT - RIGHT) / 2.0;
        assert!(svg.contains(&format!(r#"x1="{mid:.1}""#)));
    }
}
