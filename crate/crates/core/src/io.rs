//! Polygon files: `{"vertices": [[x, y], ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{AffinePolygon, MIN_VERTICES};

#[derive(Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

pub fn parse_polygon(text: &str) -> Result<AffinePolygon> {
    let file: PolygonFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.vertices.len() < MIN_VERTICES {
        return Err(Error::TooFewVertices(file.vertices.len()));
    }
    if let Some(bad) = file.vertices.iter().flatten().find(|c| !c.is_finite()) {
        return Err(Error::Format(format!("non-finite coordinate {bad}")));
    }
    let xy: Vec<(f64, f64)> = file.vertices.iter().map(|v| (v[0], v[1])).collect();
    AffinePolygon::from_xy(&xy)
}

/// Pretty-printed JSON; `f64` values round-trip exactly.
pub fn polygon_to_json(p: &AffinePolygon) -> String {
    let file = PolygonFile {
        vertices: p.points().iter().map(|v| [v.x, v.y]).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
    s.push('\n');
    s
}
