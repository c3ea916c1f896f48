//! Self-contained SVG figures: a filled-cell heatmap and a line plot.

use std::fmt::Write as _;

const MARGIN: f64 = 60.0;
const PLOT: f64 = 480.0;

/// Values on a regular grid, row-major with `x` varying fastest.
pub struct Grid<'a> {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub values: &'a [f64],
}

/// Sequential colour ramp from white (0) to dark blue (1).
fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    (lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

fn header(s: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn axes(s: &mut String, title: &str, x_label: &str, y_label: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (left, top, bottom) = (MARGIN, MARGIN, MARGIN + PLOT);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        left + PLOT / 2.0,
        top - 20.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + PLOT / 2.0,
        bottom + 40.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" transform="rotate(-90 {x} {y})">{}</text>"#,
        escape(y_label),
        x = left - 42.0,
        y = top + PLOT / 2.0,
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = xr.0 + f * (xr.1 - xr.0);
        let yv = yr.0 + f * (yr.1 - yr.0);
        let px = left + f * PLOT;
        let py = bottom - f * PLOT;
        let _ = writeln!(
            s,
            r#"<line x1="{px}" y1="{bottom}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick(yv)
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Heatmap of `grid`, normalized to its maximum, with `y` increasing upward.
pub fn heatmap(grid: &Grid<'_>, title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    header(&mut s, PLOT + 2.0 * MARGIN, PLOT + 2.0 * MARGIN);
    let max = grid.values.iter().fold(0.0f64, |a, &v| a.max(v));
    let cw = PLOT / grid.nx as f64;
    let ch = PLOT / grid.ny as f64;
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = grid.values[j * grid.nx + i];
            let (r, g, b) = ramp(if max > 0.0 { v / max } else { 0.0 });
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                MARGIN + i as f64 * cw,
                MARGIN + PLOT - (j + 1) as f64 * ch,
                cw,
                ch
            );
        }
    }
    let _ = writeln!(s, "</g>");
    axes(&mut s, title, x_label, y_label, grid.x_range, grid.y_range);
    let _ = writeln!(s, "</svg>");
    s
}

/// Line plot of `(x, y)` points with the y axis spanning `[0, max(1, y_max)]`.
pub fn line_plot(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    header(&mut s, PLOT + 2.0 * MARGIN, PLOT + 2.0 * MARGIN);
    let (x0, x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    let (x0, x1) = if x0 < x1 {
        (x0, x1)
    } else {
        (x0 - 0.5, x0 + 0.5)
    };
    let y1 = points.iter().fold(1.0f64, |a, p| a.max(p.1));
    let mut path = String::new();
    for &(x, y) in points {
        let px = MARGIN + (x - x0) / (x1 - x0) * PLOT;
        let py = MARGIN + PLOT - y / y1 * PLOT;
        let _ = write!(path, "{px:.2},{py:.2} ");
    }
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="rgb(8,48,107)" stroke-width="1.5"/>"#,
        path.trim_end()
    );
    axes(&mut s, title, x_label, y_label, (x0, x1), (0.0, y1));
    let _ = writeln!(s, "</svg>");
    s
}
