//! Text formats: polynomial coefficient files, orbit CSV and SVG drawings
//! of singular segments.

use std::fmt::Write as _;

use crate::dynamics::OrbitResult;
use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::symbolic::SingularSegment;
use crate::transversality::BoundedPoly;

/// One coefficient per line, constant term first. Blank lines and `#`
/// comments are skipped.
pub fn parse_polynomial(text: &str) -> Result<BoundedPoly> {
    let mut coeffs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let c: f64 = line.parse().map_err(|e| Error::parse(i + 1, format!("{e}")))?;
        if !c.is_finite() {
            return Err(Error::parse(i + 1, "coefficient is not finite"));
        }
        coeffs.push(c);
    }
    if coeffs.is_empty() {
        return Err(Error::parse(0, "no coefficients"));
    }
    Ok(BoundedPoly::new(coeffs))
}

/// `step,x,y,cone_index` with 1-based cone labels; the cone column of the
/// last row is empty.
pub fn orbit_csv(orbit: &OrbitResult) -> String {
    let mut out = String::from("step,x,y,cone_index\n");
    let symbols: Vec<usize> = orbit.itinerary.iter().collect();
    for (i, z) in orbit.points.iter().enumerate() {
        let cone = symbols.get(i).map(|k| (k + 1).to_string()).unwrap_or_default();
        writeln!(out, "{i},{:?},{:?},{cone}", z.x, z.y).unwrap();
    }
    out
}

/// SVG line drawing of the polygon and the segments, in plane coordinates
/// with the y axis pointing up.
pub fn singular_svg(poly: &ConvexPolygon, segments: &[SingularSegment], radius: f64) -> String {
    let size = 800.0;
    let scale = size / (2.0 * radius);
    let tx = |x: f64| (x + radius) * scale;
    let ty = |y: f64| (radius - y) * scale;
    let max_order = segments.iter().map(|s| s.order).max().unwrap_or(1);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#).unwrap();
    let pts: Vec<String> = poly
        .vertices()
        .iter()
        .map(|v| format!("{:.6},{:.6}", tx(v.x), ty(v.y)))
        .collect();
    writeln!(out, r#"<polygon points="{}" fill="black"/>"#, pts.join(" ")).unwrap();
    for s in segments {
        let shade = if max_order > 1 {
            200 * (s.order - 1) / (max_order - 1)
        } else {
            0
        };
        writeln!(
            out,
            r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="rgb({shade},{shade},255)" stroke-width="1"/>"#,
            tx(s.start.x),
            ty(s.start.y),
            tx(s.end.x),
            ty(s.end.y)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
