//! Plain SVG and CSV dumps of planar overlays.

use std::fmt::Write;

use crate::error::{Error, Result};

use super::{OverlayGraph, VertexKind};

/// Largest overlay that [`to_svg`] will draw.
pub const SVG_VERTEX_LIMIT: usize = 2000;

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

/// Draws a planar overlay in the unit square (torus) or its bounding box.
/// Edges that wrap around the torus are drawn unrolled from their first end.
pub fn to_svg(g: &OverlayGraph) -> Result<String> {
    if g.d != 2 {
        return Err(Error::Unsupported(format!("drawing a {}-dimensional overlay", g.d)));
    }
    if g.vertices.len() > SVG_VERTEX_LIMIT {
        return Err(Error::TooLarge { limit: SVG_VERTEX_LIMIT, found: g.vertices.len() });
    }
    let (lo, hi) = if g.periodic {
        ([0.0, 0.0], [1.0, 1.0])
    } else {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &g.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v.position[k]);
                hi[k] = hi[k].max(v.position[k]);
            }
        }
        if g.vertices.is_empty() {
            ([0.0, 0.0], [1.0, 1.0])
        } else {
            let pad = 0.1 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
            ([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad])
        }
    };
    let size = 800.0;
    let scale = size / (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let map = |p: [f64; 2]| ((p[0] - lo[0]) * scale, size - (p[1] - lo[1]) * scale);
    let reach = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for e in &g.edges {
        let Some(a) = e.ends[0] else { continue };
        let pa = [g.vertices[a].position[0], g.vertices[a].position[1]];
        let pb = match e.ends[1] {
            Some(_) if g.periodic || e.tangent.len() == 2 => [pa[0] + e.tangent[0], pa[1] + e.tangent[1]],
            Some(b) => [g.vertices[b].position[0], g.vertices[b].position[1]],
            None => {
                let n = (e.tangent[0].powi(2) + e.tangent[1].powi(2)).sqrt().max(1e-300);
                [pa[0] + reach * e.tangent[0] / n, pa[1] + reach * e.tangent[1] / n]
            }
        };
        let (x0, y0) = map(pa);
        let (x1, y1) = map(pb);
        let color = PALETTE[e.color % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="{color}" stroke-width="1.5"/>"#
        );
    }
    for v in &g.vertices {
        let (x, y) = map([v.position[0], v.position[1]]);
        let fill = match v.kind {
            VertexKind::Mono(j) => PALETTE[j % PALETTE.len()],
            VertexKind::Crossing => "black",
        };
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{fill}"/>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One row per vertex: `index,kind,color,x,y,...`, where `color` is empty
/// for crossings.
pub fn vertices_csv(g: &OverlayGraph) -> String {
    let mut out = String::from("index,kind,color");
    for k in 0..g.d {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for (i, v) in g.vertices.iter().enumerate() {
        let (kind, color) = match v.kind {
            VertexKind::Mono(j) => ("mono", j.to_string()),
            VertexKind::Crossing => ("crossing", String::new()),
        };
        let _ = write!(out, "{i},{kind},{color}");
        for x in &v.position {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

/// One row per edge: `index,from,to,color`, with `to` empty for rays.
pub fn edges_csv(g: &OverlayGraph) -> String {
    let mut out = String::from("index,from,to,color\n");
    for (i, e) in g.edges.iter().enumerate() {
        let end = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{i},{},{},{}", end(e.ends[0]), end(e.ends[1]), e.color);
    }
    out
}
