//! Static SVG line plot of mean accuracy with a ±std band.

use std::fmt::Write as _;

use eqcnn::train::AggregatePoint;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub fn accuracy_svg(title: &str, points: &[AggregatePoint]) -> String {
    let max_it = points.iter().map(|p| p.iteration).max().unwrap_or(1).max(1) as f64;
    let x = |it: usize| MARGIN + (W - 2.0 * MARGIN) * it as f64 / max_it;
    let y = |acc: f64| H - MARGIN - (H - 2.0 * MARGIN) * acc.clamp(0.0, 1.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="25" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    // Axes and ticks.
    let _ = writeln!(
        svg,
        r#"<path d="M{MARGIN},{MARGIN} V{} H{}" stroke="black" fill="none"/>"#,
        H - MARGIN,
        W - MARGIN
    );
    for k in 0..=4 {
        let acc = k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{acc:.2}</text>"#,
            MARGIN - 5.0,
            y(acc) + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">iteration (max {})</text>"#,
        W / 2.0,
        H - 15.0,
        max_it
    );
    if !points.is_empty() {
        let upper: Vec<String> = points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.iteration), y(p.mean_acc + p.std_acc)))
            .collect();
        let lower: Vec<String> = points
            .iter()
            .rev()
            .map(|p| format!("{:.2},{:.2}", x(p.iteration), y(p.mean_acc - p.std_acc)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{} {}" fill="steelblue" fill-opacity="0.25" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let mean: Vec<String> = points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.iteration), y(p.mean_acc)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            mean.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
