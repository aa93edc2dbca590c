//! Minimal hand-written SVG: a heatmap of `u(x, t)` and log-log line plots.

use std::fmt::Write as _;

use qlt_core::SpaceTimeField;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
/// Heatmaps are downsampled to at most this many cells per axis.
const MAX_CELLS: usize = 160;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title))
        .unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Blue → white → red ramp on `[0, 1]`.
fn color(s: f64) -> String {
    let s = s.clamp(0.0, 1.0);
    let (r, g, b) = if s < 0.5 {
        let a = s / 0.5;
        (40.0 + 215.0 * a, 70.0 + 185.0 * a, 160.0 + 95.0 * a)
    } else {
        let a = (s - 0.5) / 0.5;
        (255.0 - 35.0 * a, 255.0 - 205.0 * a, 255.0 - 215.0 * a)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

pub fn heatmap(u: &SpaceTimeField, title: &str) -> String {
    let (grid, tgrid) = (u.grid(), u.tgrid());
    let (nx, nl) = (grid.nx(), tgrid.levels());
    let sx = nx.div_ceil(MAX_CELLS).max(1);
    let st = nl.div_ceil(MAX_CELLS).max(1);
    let (lo, hi) = (u.min(), u.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cols = nx.div_ceil(sx);
    let rows = nl.div_ceil(st);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let (cw, ch) = (plot_w / cols as f64, plot_h / rows as f64);

    let mut out = String::new();
    header(&mut out, title);
    for r in 0..rows {
        let level = u.level(r * st);
        let y = HEIGHT - MARGIN - (r + 1) as f64 * ch;
        for c in 0..cols {
            let v = level[c * sx];
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                MARGIN + c as f64 * cw,
                y,
                cw + 0.05,
                ch + 0.05,
                color((v - lo) / span)
            )
            .unwrap();
        }
    }
    axes(&mut out, "x", "t");
    let labels = [
        (MARGIN, HEIGHT - MARGIN + 16.0, "middle", format!("{}", grid.x_a())),
        (WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle", format!("{}", grid.x_b())),
        (MARGIN - 6.0, HEIGHT - MARGIN, "end", "0".to_string()),
        (MARGIN - 6.0, MARGIN + 4.0, "end", format!("{}", tgrid.horizon())),
        (WIDTH - MARGIN + 4.0, MARGIN - 8.0, "start", format!("max {hi:.3e}")),
        (WIDTH - MARGIN + 4.0, HEIGHT - MARGIN + 30.0, "start", format!("min {lo:.3e}")),
    ];
    for (x, y, anchor, text) in labels {
        writeln!(out, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{text}</text>"#).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, xlabel: &str, ylabel: &str) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 14.0).unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
}

/// Log-log plot of each named series against `xs`; nonpositive points are skipped.
pub fn loglog(title: &str, xlabel: &str, xs: &[f64], series: &[(&str, Vec<Option<f64>>)]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xlabel, "value");
    let positive: Vec<f64> =
        series.iter().flat_map(|(_, ys)| ys.iter().flatten().copied()).filter(|v| *v > 0.0 && v.is_finite()).collect();
    let xpos: Vec<f64> = xs.iter().copied().filter(|v| *v > 0.0).collect();
    if positive.is_empty() || xpos.len() < 2 {
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">no positive data</text>"#, WIDTH / 2.0, HEIGHT / 2.0)
            .unwrap();
        out.push_str("</svg>\n");
        return out;
    }
    let (xmin, xmax) = bounds(&xpos);
    let (ymin, ymax) = bounds(&positive);
    let px = |x: f64| MARGIN + (x.log10() - xmin) / (xmax - xmin) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y.log10() - ymin) / (ymax - ymin) * (HEIGHT - 2.0 * MARGIN);

    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let points: Vec<(f64, f64)> = xs
            .iter()
            .zip(ys)
            .filter_map(|(x, y)| y.filter(|v| *v > 0.0 && v.is_finite() && *x > 0.0).map(|v| (px(*x), py(v))))
            .collect();
        if points.len() > 1 {
            let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                path.join(" ")
            )
            .unwrap();
        }
        for (x, y) in &points {
            writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#).unwrap();
        }
        let ly = MARGIN + 14.0 * k as f64;
        writeln!(
            out,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN,
            escape(name)
        )
        .unwrap();
    }
    for (v, x, y, anchor) in [
        (10f64.powf(xmin), MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
        (10f64.powf(xmax), WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
        (10f64.powf(ymin), MARGIN - 6.0, HEIGHT - MARGIN, "end"),
        (10f64.powf(ymax), MARGIN - 6.0, MARGIN + 4.0, "end"),
    ] {
        writeln!(out, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{v:.2e}</text>"#).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Decade-padded log10 range.
fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min).log10();
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max).log10();
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qlt_core::{SpatialGrid, TimeGrid};

    #[test]
    fn heatmap_is_well_formed() {
        let g = SpatialGrid::new(1.0, 2.0, 401).unwrap();
        let t = TimeGrid::new(0.5, 400).unwrap();
        let u = SpaceTimeField::from_fn(g, t, |x, t| x * t).unwrap();
        let svg = heatmap(&u, "u");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.matches("<rect").count() <= MAX_CELLS * MAX_CELLS + 1);
    }

    #[test]
    fn loglog_handles_missing_and_zero_values() {
        let svg =
            loglog("c", "n", &[4.0, 8.0, 16.0], &[("a", vec![Some(1.0), Some(0.5), None]), ("z", vec![Some(0.0); 3])]);
        assert_eq!(svg.matches("<circle").count(), 2);
        let empty = loglog("c", "n", &[4.0, 8.0], &[("z", vec![Some(0.0), None])]);
        assert!(empty.contains("no positive data"));
    }

    #[test]
    fn colour_ramp_endpoints() {
        assert_eq!(color(0.5), "#ffffff");
        assert_ne!(color(0.0), color(1.0));
    }
}
