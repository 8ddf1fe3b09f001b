//! SVG export of embedding scenes. Euclidean scenes project to the first
//! two coordinates; scenes involving a half-space factor project to
//! (first coordinate, log of the last coordinate) so vertical geodesics
//! render with even spacing.

use crate::error::Result;
use crate::geometry::embed::ThickEmbedding;
use crate::geometry::space::ModelSpace;
use std::fmt::Write as _;

fn has_halfspace(space: &ModelSpace) -> bool {
    match space {
        ModelSpace::HalfSpace(_) => true,
        ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => fs.iter().any(has_halfspace),
        _ => false,
    }
}

fn project(space: &ModelSpace, p: &[f64]) -> (f64, f64) {
    if has_halfspace(space) {
        (p[0], p[p.len() - 1].ln())
    } else {
        (p[0], if p.len() > 1 { p[1] } else { 0.0 })
    }
}

/// Renders vertices as dots and edge paths as polylines.
pub fn export_svg(e: &ThickEmbedding) -> Result<String> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for p in &e.vertex_points {
        pts.push(project(&e.space, p));
    }
    let mut polys: Vec<Vec<(f64, f64)>> = Vec::new();
    for path in e.edge_paths.values() {
        polys.push(path.points.iter().map(|p| project(&e.space, p)).collect());
    }
    let all = pts.iter().chain(polys.iter().flatten());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if pts.is_empty() && polys.is_empty() {
        x0 = 0.0;
        y0 = 0.0;
        x1 = 1.0;
        y1 = 1.0;
    }
    let w = (x1 - x0).max(1e-9);
    let h = (y1 - y0).max(1e-9);
    let margin = 0.05 * w.max(h);
    let stroke = 0.01 * w.max(h);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - margin,
        y0 - margin,
        w + 2.0 * margin,
        h + 2.0 * margin
    )
    .unwrap();
    for poly in &polys {
        let coords: Vec<String> = poly.iter().map(|(x, y)| format!("{x},{y}")).collect();
        writeln!(
            out,
            r##"  <polyline points="{}" fill="none" stroke="#555" stroke-width="{stroke}"/>"##,
            coords.join(" ")
        )
        .unwrap();
    }
    for (x, y) in &pts {
        writeln!(
            out,
            r##"  <circle cx="{x}" cy="{y}" r="{}" fill="#c33"/>"##,
            2.0 * stroke
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::embed::{complete_slab_embedding, slab_to_h3};

    #[test]
    fn svg_contains_scene_elements() {
        let e = slab_to_h3(&complete_slab_embedding(3).unwrap()).unwrap();
        let svg = export_svg(&e).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
