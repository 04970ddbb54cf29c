//! SVG drawings of instances and tours.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::nnr::TourPath;

const CELL: f64 = 48.0;
const MARGIN: f64 = 32.0;
const DOT_RADIUS: f64 = 4.0;

/// Draws cities as dots, the tour as arrows in visiting order (including the
/// closing arrow of a closed tour) and labels the landmarks `l` and `m`.
/// Output is byte-identical for identical input.
pub fn render_svg(instance: &Instance, tour: Option<&TourPath>) -> Result<String> {
    let n = instance.len();
    if let Some(&index) = tour.and_then(|t| t.order().iter().find(|&&c| c >= n)) {
        return Err(Error::CityIndex { index, n });
    }
    let pts: Vec<(f64, f64)> = (0..n).map(|i| instance.true_coords(i)).collect();
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let width = (max_x - min_x) * CELL + 2.0 * MARGIN;
    let height = (max_y - min_y) * CELL + 2.0 * MARGIN;
    let at = |i: usize| {
        let (x, y) = pts[i];
        (MARGIN + (x - min_x) * CELL, MARGIN + (max_y - y) * CELL)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    out.push_str(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M 0 0 L 10 5 L 0 10 z" fill="#1f5fbf"/></marker></defs>
"##,
    );
    out.push_str("<g class=\"tour\" stroke=\"#1f5fbf\" stroke-width=\"1.5\">\n");
    if let Some(tour) = tour {
        for (a, b) in tour.edges() {
            let ((x1, y1), (x2, y2)) = (at(a), at(b));
            let len = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
            let trim = if len > 0.0 { (DOT_RADIUS + 2.0) / len } else { 0.0 };
            let (dx, dy) = ((x2 - x1) * trim, (y2 - y1) * trim);
            let _ = writeln!(
                out,
                r#"<line class="edge" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" marker-end="url(#arrow)"/>"#,
                x1 + dx,
                y1 + dy,
                x2 - dx,
                y2 - dy
            );
        }
    }
    out.push_str("</g>\n<g class=\"cities\" fill=\"black\">\n");
    for i in 0..n {
        let (x, y) = at(i);
        let _ = writeln!(out, r#"<circle class="city" cx="{x:.2}" cy="{y:.2}" r="{DOT_RADIUS}"/>"#);
    }
    out.push_str("</g>\n");
    for (label, i, dy) in [("l", instance.landmark_l(), 18.0), ("m", instance.landmark_m(), -10.0)] {
        let (x, y) = at(i);
        let _ = writeln!(
            out,
            r#"<text class="landmark" x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="serif" font-size="14">{label}</text>"#,
            y + dy
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
