//! Overlays of mono-chromatic Voronoi tessellations.
//!
//! [`membrane_overlay`] reads the overlay off the chromatic mosaic: its
//! `p`-cells are dual to the `tau`-colorful faces of dimension `t + d - p`.
//! [`arrangement`] builds the same subdivision directly by intersecting
//! Voronoi skeletons in the plane (or on the line), as an independent check.

pub mod arrangement;
pub mod svg;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::chromatic::{color_mask, restrict, ChromaticMosaic};
use crate::delaunay::{faces, FaceKey, SimplicialMosaic};
use crate::error::{Error, Result};

pub use arrangement::{
    arrangement_overlay_1d, arrangement_overlay_2d, oracle_overlay, voronoi_skeleton, SkeletonEdge, VoronoiSkeleton,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// A vertex of the Voronoi tessellation of one color.
    Mono(usize),
    /// Where cells of two or more colors cross.
    Crossing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayVertex {
    /// Position in `R^d`, reduced modulo 1 on the torus.
    pub position: Vec<f64>,
    pub kind: VertexKind,
    /// Color multiplicities of the dual face (membrane overlays) or the
    /// colors meeting there (arrangements).
    pub signature: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayEdge {
    /// End vertices; `None` for an end at infinity.
    pub ends: [Option<usize>; 2],
    /// Color of the Voronoi cell the edge lies in.
    pub color: usize,
    /// Displacement from the first end to the second, or the direction
    /// towards infinity when an end is missing.
    pub tangent: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayGraph {
    pub d: usize,
    pub colors: Vec<usize>,
    pub vertices: Vec<OverlayVertex>,
    pub edges: Vec<OverlayEdge>,
    /// Number of `p`-cells for `p = 0..=d`.
    pub counts: Vec<usize>,
    pub periodic: bool,
}

impl OverlayGraph {
    /// Alternating sum of the cell counts.
    pub fn euler(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    pub fn crossings(&self) -> usize {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Crossing).count()
    }

    /// Histograms of vertex degrees, split by kind.
    pub fn degree_audit(&self) -> DegreeAudit {
        let mut degree = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            for v in e.ends.iter().flatten() {
                degree[*v] += 1;
            }
        }
        let mut audit = DegreeAudit::default();
        for (v, &k) in self.vertices.iter().zip(&degree) {
            let hist = match v.kind {
                VertexKind::Mono(_) => &mut audit.mono,
                VertexKind::Crossing => &mut audit.crossing,
            };
            *hist.entry(k).or_insert(0) += 1;
        }
        audit
    }

    /// Number of faces found by walking the rotation system of a planar
    /// overlay; ends at infinity meet in one extra vertex.
    pub fn traced_faces(&self) -> Result<usize> {
        if self.d != 2 {
            return Err(Error::Unsupported("face tracing needs d = 2".into()));
        }
        trace_faces(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeAudit {
    pub mono: BTreeMap<usize, usize>,
    pub crossing: BTreeMap<usize, usize>,
}

impl DegreeAudit {
    /// Every mono vertex has degree `d + 1` and every crossing degree `2d`.
    pub fn is_generic(&self, d: usize) -> bool {
        self.mono.keys().all(|&k| k == d + 1) && self.crossing.keys().all(|&k| k == 2 * d)
    }
}

fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// The overlay of the tessellations of the colors in `tau`, projected from
/// the `tau`-membrane of the chromatic mosaic.
pub fn membrane_overlay(cm: &ChromaticMosaic, tau: &[usize]) -> Result<OverlayGraph> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    tau.dedup();
    let r = restrict(cm, &tau)?;
    let mask = color_mask(&tau);
    let t = tau.len() - 1;
    let d = cm.d;
    let top = t + d;
    let local_colors: Vec<usize> = cm.colors.iter().copied().filter(|&c| mask & (1 << c) != 0).collect();
    let signature = |f: &FaceKey| -> Vec<u32> {
        let mut c = vec![0u32; cm.s + 1];
        for v in f.vertices() {
            c[local_colors[v]] += 1;
        }
        c
    };
    let colorful = |sig: &[u32]| -> bool {
        let support = sig.iter().enumerate().filter(|(_, &c)| c > 0).fold(0u32, |m, (j, _)| m | (1 << j));
        support == mask
    };
    let periodic = r.is_periodic();
    let spatial = |c: &[f64]| -> Vec<f64> { c[t..t + d].to_vec() };

    // vertices: colorful top cells
    let mut vertex_of = vec![None; r.cells.len()];
    let mut vertices = Vec::new();
    for (c, cell) in r.cells.iter().enumerate() {
        let sig = signature(cell);
        if !colorful(&sig) {
            continue;
        }
        let mut position = spatial(&r.circumcenters[c].coords);
        if periodic {
            position.iter_mut().for_each(|x| *x = reduce(*x));
        }
        let kind = match sig.iter().position(|&m| m as usize == d + 1) {
            Some(j) => VertexKind::Mono(j),
            None => VertexKind::Crossing,
        };
        vertex_of[c] = Some(vertices.len());
        vertices.push(OverlayVertex { position, kind, signature: sig });
    }

    // edges: colorful facets of colorful top cells
    let mut edges = Vec::new();
    let mut seen: HashMap<FaceKey, ()> = HashMap::new();
    for (c, cell) in r.cells.iter().enumerate() {
        let Some(a) = vertex_of[c] else { continue };
        for slot in 0..cell.len() {
            let facet = cell.facet(slot);
            let sig = signature(&facet);
            if !colorful(&sig) || seen.insert(facet, ()).is_some() {
                continue;
            }
            let color = sig.iter().position(|&m| m as usize == d).unwrap_or(tau[0]);
            let here = spatial(&r.circumcenters[c].coords);
            let edge = match r.across(c, slot) {
                Some((n, _, shift)) => {
                    let mut there = r.circumcenters[n].coords.clone();
                    for (k, &axis) in r.periodic_axes.iter().enumerate() {
                        there[axis] += shift[k] as f64;
                    }
                    let there = spatial(&there);
                    OverlayEdge {
                        ends: [Some(a), vertex_of[n]],
                        color,
                        tangent: there.iter().zip(&here).map(|(x, y)| x - y).collect(),
                    }
                }
                None => OverlayEdge { ends: [Some(a), None], color, tangent: spatial(&outward_normal(&r, c, slot)) },
            };
            edges.push(edge);
        }
    }

    let counts = (0..=d)
        .map(|p| {
            if p == 0 {
                vertices.len()
            } else if p == 1 {
                edges.len()
            } else {
                faces(&r, top - p).iter().filter(|f| colorful(&signature(f))).count()
            }
        })
        .collect();
    Ok(OverlayGraph { d, colors: tau, vertices, edges, counts, periodic })
}

/// Unit normal of facet `slot` of cell `c`, pointing away from the cell.
pub(crate) fn outward_normal(m: &SimplicialMosaic, c: usize, slot: usize) -> Vec<f64> {
    let pts = m.face_coords(&m.cells[c]);
    let apex = &pts[slot];
    let facet: Vec<&Vec<f64>> = pts.iter().enumerate().filter(|&(i, _)| i != slot).map(|(_, p)| p).collect();
    let base = facet[0];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &facet[1..] {
        let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut n: Vec<f64> = apex.iter().zip(base).map(|(a, b)| a - b).collect();
    for b in &basis {
        let dot: f64 = n.iter().zip(b).map(|(x, y)| x * y).sum();
        n.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
    }
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    n.into_iter().map(|x| -x / norm).collect()
}

/// Crossing counts read off the chromatic mosaic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossingCensus {
    /// Vertices of the full overlay minus mono-chromatic Voronoi vertices.
    pub surplus: i64,
    /// Colorful top cells without a color of multiplicity `d + 1`.
    pub tally: u64,
    pub by_signature: BTreeMap<Vec<u32>, u64>,
    /// Crossings grouped by the colors whose cells meet there (colors of
    /// multiplicity at least 2).
    pub by_colors: BTreeMap<Vec<usize>, u64>,
}

pub fn crossing_census(cm: &ChromaticMosaic) -> CrossingCensus {
    let d = cm.d;
    let full = (1u32 << (cm.s + 1)) - 1;
    let mut census = CrossingCensus::default();
    let mut n0 = 0i64;
    for cell in faces(&cm.base, cm.s + d) {
        let sig = cm.signature(&cell);
        if sig.support() != full {
            continue;
        }
        n0 += 1;
        if sig.counts.iter().all(|&m| (m as usize) <= d) {
            census.tally += 1;
            *census.by_signature.entry(sig.counts.clone()).or_insert(0) += 1;
            let colors: Vec<usize> = (0..=cm.s).filter(|&j| sig.counts[j] >= 2).collect();
            *census.by_colors.entry(colors).or_insert(0) += 1;
        }
    }
    let m0 = if d <= cm.base.dimension {
        faces(&cm.base, d).iter().filter(|f| cm.signature(f).support().count_ones() == 1).count() as i64
    } else {
        0
    };
    census.surplus = n0 - m0;
    census
}

/// Torus-aware distance between positions.
fn position_distance(a: &[f64], b: &[f64], periodic: bool) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut t = (x - y).abs();
            if periodic {
                t = t.min(1.0 - t);
            }
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

/// Whether the two vertex sets match one-to-one within `tol`, with equal
/// kinds.
pub fn vertices_match(a: &OverlayGraph, b: &OverlayGraph, tol: f64) -> bool {
    if a.vertices.len() != b.vertices.len() {
        return false;
    }
    let periodic = a.periodic || b.periodic;
    let cell = tol.max(1e-9) * 4.0;
    let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / cell).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, v) in b.vertices.iter().enumerate() {
        grid.entry(key(&v.position)).or_default().push(i);
    }
    let wrap = (1.0 / cell).floor() as i64;
    let mut used = vec![false; b.vertices.len()];
    for v in &a.vertices {
        let k = key(&v.position);
        let mut found = None;
        let dims = k.len();
        let mut probe = vec![-1i64; dims];
        'search: loop {
            let mut q: Vec<i64> = k.iter().zip(&probe).map(|(x, o)| x + o).collect();
            let mut variants = vec![q.clone()];
            if periodic {
                for axis in 0..dims {
                    for w in [-wrap, wrap, -wrap - 1, wrap + 1] {
                        let mut z = q.clone();
                        z[axis] += w;
                        variants.push(z);
                    }
                }
            }
            for z in variants {
                if let Some(list) = grid.get(&z) {
                    for &i in list {
                        if !used[i]
                            && b.vertices[i].kind == v.kind
                            && position_distance(&b.vertices[i].position, &v.position, periodic) <= tol
                        {
                            found = Some(i);
                            break 'search;
                        }
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == dims {
                    break 'search;
                }
                probe[axis] += 1;
                if probe[axis] <= 1 {
                    break;
                }
                probe[axis] = -1;
                axis += 1;
            }
            q.clear();
        }
        match found {
            Some(i) => used[i] = true,
            None => return false,
        }
    }
    true
}

/// Faces of a planar overlay by walking the rotation system: at each vertex
/// the half-edges are ordered by angle; leaving along `u -> v`, the walk
/// continues with the half-edge after `v -> u` in clockwise order.
fn trace_faces(g: &OverlayGraph) -> Result<usize> {
    let inf = g.vertices.len();
    // half-edge h = 2e + side leaves ends[side] along (-1)^side tangent
    let n_half = 2 * g.edges.len();
    let mut around: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); inf + 1];
    for (e, edge) in g.edges.iter().enumerate() {
        let t = &edge.tangent;
        if t.len() != 2 {
            return Err(Error::InvalidInput("planar tangents expected".into()));
        }
        for side in 0..2 {
            let (dx, dy) = if side == 0 { (t[0], t[1]) } else { (-t[0], -t[1]) };
            match edge.ends[side] {
                Some(v) => around[v].push((dy.atan2(dx), 0.0, 2 * e + side)),
                None => {
                    // seen from infinity the circular order is reversed;
                    // parallel rays are ordered by their offset
                    let offset = edge.ends[1 - side].map_or(0.0, |v| {
                        let p = &g.vertices[v].position;
                        (dx * p[1] - dy * p[0]) / dx.hypot(dy)
                    });
                    around[inf].push((-(-dy).atan2(-dx), offset, 2 * e + side))
                }
            }
        }
    }
    let mut next_cw = vec![usize::MAX; n_half];
    for list in around.iter_mut() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let k = list.len();
        for i in 0..k {
            // clockwise successor of list[i] is list[i - 1]
            next_cw[list[i].2] = list[(i + k - 1) % k].2;
        }
    }
    let mut visited = vec![false; n_half];
    let mut faces = 0;
    for start in 0..n_half {
        if visited[start] {
            continue;
        }
        faces += 1;
        let mut h = start;
        while !visited[h] {
            visited[h] = true;
            let twin = h ^ 1;
            h = next_cw[twin];
        }
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chromatic::{chromatic_delaunay, Coloring};
    use crate::geometry::PointSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn instance(n: usize, s: usize, periodic: bool, seed: u64) -> (PointSet, Coloring) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let chi = (0..n).map(|i| if i < 3 * (s + 1) { i % (s + 1) } else { rng.gen_range(0..=s) }).collect();
        (PointSet::from_coords(2, coords, periodic).unwrap(), Coloring::new(s, chi).unwrap())
    }

    #[test]
    fn single_color_overlay_is_the_voronoi_tessellation() {
        let (ps, chi) = instance(30, 1, true, 4);
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        let g = membrane_overlay(&cm, &[0]).unwrap();
        let mono_top = cm.base.cells.iter().count();
        assert!(mono_top > 0);
        let class0 = faces(&cm.base, 2).iter().filter(|f| cm.signature(f).counts == vec![3, 0]).count();
        assert_eq!(g.vertices.len(), class0);
        assert_eq!(g.crossings(), 0);
        assert_eq!(g.euler(), 0);
    }

    #[test]
    fn torus_overlay_has_euler_zero_and_generic_degrees() {
        for seed in 0..5 {
            let (ps, chi) = instance(40, 1, true, seed);
            let cm = chromatic_delaunay(&ps, &chi).unwrap();
            let g = membrane_overlay(&cm, &[0, 1]).unwrap();
            assert_eq!(g.euler(), 0);
            assert!(g.degree_audit().is_generic(2), "{:?}", g.degree_audit());
            assert_eq!(g.traced_faces().unwrap(), g.counts[2]);
            let census = crossing_census(&cm);
            assert_eq!(census.surplus, g.crossings() as i64);
            assert_eq!(census.tally as i64, census.surplus);
        }
    }

    #[test]
    fn bounded_overlay_is_a_disk() {
        let (ps, chi) = instance(25, 1, false, 8);
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        let g = membrane_overlay(&cm, &[0, 1]).unwrap();
        assert_eq!(g.euler(), 1);
        assert!(g.degree_audit().is_generic(2));
        assert_eq!(g.traced_faces().unwrap(), g.counts[2]);
    }

    #[test]
    fn one_color_has_no_crossings() {
        let (ps, _) = instance(20, 0, true, 1);
        let cm = chromatic_delaunay(&ps, &Coloring::new(0, vec![0; 20]).unwrap()).unwrap();
        let c = crossing_census(&cm);
        assert_eq!(c.surplus, 0);
        assert_eq!(c.tally, 0);
    }

    #[test]
    fn three_colors_cross_in_pairs() {
        let (ps, chi) = instance(36, 2, true, 3);
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        let c = crossing_census(&cm);
        assert_eq!(c.surplus, c.tally as i64);
        assert!(c.by_colors.keys().all(|k| k.len() == 2));
        let g = membrane_overlay(&cm, &[0, 1, 2]).unwrap();
        assert_eq!(g.crossings() as u64, c.tally);
        assert_eq!(g.euler(), 0);
    }
}
