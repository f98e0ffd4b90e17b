use std::fmt::Write;

use pentagram::polygon::centroid_inertia_normalize;
use pentagram::AffinePolygon;

const FRAME: usize = 256;
/// Pixels per unit of the normalized frame; normalized polygons have unit
/// second moment, so their vertices sit well inside a radius of 2.5.
const UNIT: f64 = 48.0;

/// One 256×256 frame per polygon, left to right, stroke only.
pub fn strip(frames: &[AffinePolygon]) -> String {
    let width = FRAME * frames.len().max(1);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{FRAME}" viewBox="0 0 {width} {FRAME}">"#
    )
    .unwrap();
    for (k, frame) in frames.iter().enumerate() {
        let x0 = k * FRAME;
        writeln!(
            s,
            r#"  <svg x="{x0}" y="0" width="{FRAME}" height="{FRAME}" viewBox="-128 -128 {FRAME} {FRAME}">"#
        )
        .unwrap();
        writeln!(
            s,
            r##"    <rect x="-128" y="-128" width="{FRAME}" height="{FRAME}" fill="none" stroke="#999999" stroke-width="1"/>"##
        )
        .unwrap();
        let shape = centroid_inertia_normalize(frame).map_or_else(|_| frame.clone(), |(q, _)| q);
        let points: Vec<String> = shape
            .points()
            .iter()
            .map(|v| format!("{},{}", coord(v.x * UNIT), coord(-v.y * UNIT)))
            .collect();
        writeln!(
            s,
            r#"    <polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            points.join(" ")
        )
        .unwrap();
        writeln!(s, "  </svg>").unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Three decimals, never `-0.000`.
fn coord(x: f64) -> String {
    let rounded = (x * 1000.0).round() / 1000.0;
    format!("{:.3}", rounded + 0.0)
}
