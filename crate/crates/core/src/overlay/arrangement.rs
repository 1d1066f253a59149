//! Direct overlay construction: Voronoi skeletons of the color classes,
//! intersected piece by piece.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chromatic::Coloring;
use crate::delaunay::{self, SimplicialMosaic};
use crate::error::{Error, Result};
use crate::geometry::PointSet;

use super::{outward_normal, reduce, OverlayEdge, OverlayGraph, OverlayVertex, VertexKind};

/// A piece of a planar Voronoi 1-skeleton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SkeletonEdge {
    /// Between two Voronoi vertices; on the torus `b` is the unrolled
    /// position of `to` as seen from `a`.
    Segment { from: usize, to: usize, a: [f64; 2], b: [f64; 2] },
    Ray { from: usize, a: [f64; 2], dir: [f64; 2] },
    /// A bisector of consecutive collinear points.
    Line { a: [f64; 2], dir: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiSkeleton {
    pub color: usize,
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<SkeletonEdge>,
    pub periodic: bool,
}

fn xy(c: &[f64]) -> [f64; 2] {
    [c[0], c[1]]
}

/// Voronoi 1-skeleton of a planar set, dual to its Delaunay mosaic.
pub fn voronoi_skeleton(points: &PointSet, color: usize) -> Result<VoronoiSkeleton> {
    if points.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: points.dim });
    }
    let periodic = points.periodic;
    let mosaic = if periodic {
        Some(delaunay::delaunay_periodic(points, 2)?)
    } else {
        match delaunay::delaunay(points) {
            Ok(m) => Some(m),
            Err(Error::TooFewPoints { .. }) | Err(Error::AffinelyDependent) => None,
            Err(e) => return Err(e),
        }
    };
    let Some(m) = mosaic else {
        return Ok(VoronoiSkeleton { color, vertices: Vec::new(), edges: bisector_lines(points), periodic });
    };
    Ok(skeleton_of(&m, color))
}

fn skeleton_of(m: &SimplicialMosaic, color: usize) -> VoronoiSkeleton {
    let centers: Vec<[f64; 2]> = m.circumcenters.iter().map(|c| xy(&c.coords)).collect();
    let mut edges = Vec::new();
    for c in 0..m.cells.len() {
        for slot in 0..3 {
            match m.across(c, slot) {
                Some((n, s2, shift)) => {
                    if (n, s2) < (c, slot) {
                        continue;
                    }
                    let b = [centers[n][0] + shift[0] as f64, centers[n][1] + shift[1] as f64];
                    edges.push(SkeletonEdge::Segment { from: c, to: n, a: centers[c], b });
                }
                None => {
                    let dir = outward_normal(m, c, slot);
                    edges.push(SkeletonEdge::Ray { from: c, a: centers[c], dir: xy(&dir) });
                }
            }
        }
    }
    let vertices = if m.is_periodic() {
        centers.iter().map(|p| [reduce(p[0]), reduce(p[1])]).collect()
    } else {
        centers
    };
    VoronoiSkeleton { color, vertices, edges, periodic: m.is_periodic() }
}

/// Bisectors of consecutive points of a collinear (or tiny) set.
fn bisector_lines(points: &PointSet) -> Vec<SkeletonEdge> {
    let pts: Vec<[f64; 2]> = points.points.iter().map(|p| xy(&p.coords)).collect();
    if pts.len() < 2 {
        return Vec::new();
    }
    let (p0, p1) = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (*a, *b)))
        .max_by(|x, y| dist2(x.0, x.1).total_cmp(&dist2(y.0, y.1)))
        .expect("pair");
    let axis = [p1[0] - p0[0], p1[1] - p0[1]];
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| dot(*a, axis).total_cmp(&dot(*b, axis)));
    sorted
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| {
            let mid = [(w[0][0] + w[1][0]) / 2.0, (w[0][1] + w[1][1]) / 2.0];
            let v = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
            SkeletonEdge::Line { a: mid, dir: [-v[1], v[0]] }
        })
        .collect()
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// A skeleton edge as `origin + t * dir` for `t` in `[lo, hi]`.
struct Piece {
    color: usize,
    origin: [f64; 2],
    dir: [f64; 2],
    lo: f64,
    hi: f64,
    start: Option<usize>,
    end: Option<usize>,
    /// Crossings along the piece: parameter and vertex.
    stops: Vec<(f64, usize)>,
}

impl Piece {
    fn bbox(&self) -> [f64; 4] {
        let p = [self.origin[0] + self.lo * self.dir[0], self.origin[1] + self.lo * self.dir[1]];
        let q = [self.origin[0] + self.hi * self.dir[0], self.origin[1] + self.hi * self.dir[1]];
        [p[0].min(q[0]), p[1].min(q[1]), p[0].max(q[0]), p[1].max(q[1])]
    }

    fn finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Parameters of the proper crossing of `p` with `q` translated by `shift`.
fn crossing(p: &Piece, q: &Piece, shift: [f64; 2]) -> Option<(f64, f64)> {
    let denom = cross(p.dir, q.dir);
    if denom == 0.0 {
        return None;
    }
    let qo = [q.origin[0] + shift[0] - p.origin[0], q.origin[1] + shift[1] - p.origin[1]];
    let t = cross(qo, q.dir) / denom;
    let s = cross(qo, p.dir) / denom;
    (t > p.lo && t < p.hi && s > q.lo && s < q.hi).then_some((t, s))
}

const BRUTE_FORCE_PAIRS: usize = 10_000;

/// Overlay of planar Voronoi skeletons: Voronoi vertices plus pairwise
/// crossings of differently colored pieces.
pub fn arrangement_overlay_2d(skeletons: &[VoronoiSkeleton], periodic: bool) -> Result<OverlayGraph> {
    let colors: Vec<usize> = skeletons.iter().map(|s| s.color).collect();
    let width = colors.iter().max().map_or(0, |&c| c + 1);
    let mut vertices = Vec::new();
    let mut pieces = Vec::new();
    for sk in skeletons {
        if sk.periodic != periodic {
            return Err(Error::InvalidInput("mixed periodic and bounded skeletons".into()));
        }
        let offset = vertices.len();
        for v in &sk.vertices {
            let mut signature = vec![0u32; width];
            signature[sk.color] = 1;
            vertices.push(OverlayVertex { position: v.to_vec(), kind: VertexKind::Mono(sk.color), signature });
        }
        for e in &sk.edges {
            let piece = match *e {
                SkeletonEdge::Segment { from, to, a, b } => Piece {
                    color: sk.color,
                    origin: a,
                    dir: [b[0] - a[0], b[1] - a[1]],
                    lo: 0.0,
                    hi: 1.0,
                    start: Some(offset + from),
                    end: Some(offset + to),
                    stops: Vec::new(),
                },
                SkeletonEdge::Ray { from, a, dir } => Piece {
                    color: sk.color,
                    origin: a,
                    dir,
                    lo: 0.0,
                    hi: f64::INFINITY,
                    start: Some(offset + from),
                    end: None,
                    stops: Vec::new(),
                },
                SkeletonEdge::Line { a, dir } => Piece {
                    color: sk.color,
                    origin: a,
                    dir,
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                    start: None,
                    end: None,
                    stops: Vec::new(),
                },
            };
            pieces.push(piece);
        }
    }
    let mut hits = Vec::new();
    for (i, j) in candidate_pairs(&pieces, periodic) {
        let (p, q) = (&pieces[i], &pieces[j]);
        let shifts: Vec<[f64; 2]> = if periodic {
            let (bp, bq) = (p.bbox(), q.bbox());
            let xs = (bp[0] - bq[2]).floor() as i64..=(bp[2] - bq[0]).ceil() as i64;
            let ys = (bp[1] - bq[3]).floor() as i64..=(bp[3] - bq[1]).ceil() as i64;
            xs.flat_map(|x| ys.clone().map(move |y| [x as f64, y as f64])).collect()
        } else {
            vec![[0.0, 0.0]]
        };
        for shift in shifts {
            if let Some((t, s)) = crossing(p, q, shift) {
                let id = vertices.len();
                let mut position = vec![p.origin[0] + t * p.dir[0], p.origin[1] + t * p.dir[1]];
                if periodic {
                    position.iter_mut().for_each(|x| *x = reduce(*x));
                }
                let mut signature = vec![0u32; width];
                signature[p.color] = 1;
                signature[q.color] = 1;
                vertices.push(OverlayVertex { position, kind: VertexKind::Crossing, signature });
                hits.push((t, s, id));
            }
        }
        for (t, s, id) in hits.drain(..) {
            pieces[i].stops.push((t, id));
            pieces[j].stops.push((s, id));
        }
    }
    let mut edges = Vec::new();
    for piece in &mut pieces {
        piece.stops.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut marks: Vec<(f64, Option<usize>)> = vec![(piece.lo, piece.start)];
        marks.extend(piece.stops.iter().map(|&(t, v)| (t, Some(v))));
        marks.push((piece.hi, piece.end));
        for w in marks.windows(2) {
            let ((t0, a), (t1, b)) = (w[0], w[1]);
            let edge = match (a, b) {
                (Some(_), Some(_)) => OverlayEdge {
                    ends: [a, b],
                    color: piece.color,
                    tangent: vec![(t1 - t0) * piece.dir[0], (t1 - t0) * piece.dir[1]],
                },
                (Some(_), None) => OverlayEdge { ends: [a, None], color: piece.color, tangent: piece.dir.to_vec() },
                (None, Some(_)) => {
                    OverlayEdge { ends: [b, None], color: piece.color, tangent: vec![-piece.dir[0], -piece.dir[1]] }
                }
                (None, None) => OverlayEdge { ends: [None, None], color: piece.color, tangent: piece.dir.to_vec() },
            };
            edges.push(edge);
        }
    }
    let v = vertices.len();
    let e = edges.len();
    let f = if periodic { e as i64 - v as i64 } else { 1 + e as i64 - v as i64 };
    Ok(OverlayGraph {
        d: 2,
        colors,
        vertices,
        edges,
        counts: vec![v, e, f.max(0) as usize],
        periodic,
    })
}

/// Pairs of differently colored pieces that may cross: all of them for
/// small inputs, otherwise those sharing a bucket of a uniform grid.
fn candidate_pairs(pieces: &[Piece], periodic: bool) -> Vec<(usize, usize)> {
    let n = pieces.len();
    let mut by_color: BTreeMap<usize, usize> = BTreeMap::new();
    for p in pieces {
        *by_color.entry(p.color).or_insert(0) += 1;
    }
    let total: usize = n * n / 2;
    if total <= BRUTE_FORCE_PAIRS || by_color.len() < 2 {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if pieces[i].color != pieces[j].color {
                    out.push((i, j));
                }
            }
        }
        return out;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    if periodic {
        lo = [0.0, 0.0];
        hi = [1.0, 1.0];
    } else {
        for p in pieces.iter().filter(|p| p.finite()) {
            let b = p.bbox();
            lo = [lo[0].min(b[0]), lo[1].min(b[1])];
            hi = [hi[0].max(b[2]), hi[1].max(b[3])];
        }
    }
    let g = ((n as f64).sqrt().ceil() as usize).clamp(1, 512);
    let size = [(hi[0] - lo[0]).max(1e-12) / g as f64, (hi[1] - lo[1]).max(1e-12) / g as f64];
    let cell_range = |b: [f64; 4]| -> Vec<usize> {
        let x0 = ((b[0] - lo[0]) / size[0]).floor() as i64;
        let x1 = ((b[2] - lo[0]) / size[0]).floor() as i64;
        let y0 = ((b[1] - lo[1]) / size[1]).floor() as i64;
        let y1 = ((b[3] - lo[1]) / size[1]).floor() as i64;
        let gi = g as i64;
        let mut out = Vec::new();
        if periodic {
            let xs: Vec<i64> = if x1 - x0 + 1 >= gi { (0..gi).collect() } else { (x0..=x1).map(|x| x.rem_euclid(gi)).collect() };
            let ys: Vec<i64> = if y1 - y0 + 1 >= gi { (0..gi).collect() } else { (y0..=y1).map(|y| y.rem_euclid(gi)).collect() };
            for &x in &xs {
                for &y in &ys {
                    out.push((x * gi + y) as usize);
                }
            }
        } else {
            for x in x0.max(0)..=x1.min(gi - 1) {
                for y in y0.max(0)..=y1.min(gi - 1) {
                    out.push((x * gi + y) as usize);
                }
            }
        }
        out
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); g * g];
    let mut unbounded = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        if !p.finite() {
            unbounded.push(i);
            continue;
        }
        for c in cell_range(p.bbox()) {
            buckets[c].push(i);
        }
    }
    let mut stamp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for i in 0..n {
        let mut consider = |j: usize, out: &mut Vec<(usize, usize)>| {
            if j > i && stamp[j] != i && pieces[j].color != pieces[i].color {
                stamp[j] = i;
                out.push((i, j));
            }
        };
        if pieces[i].finite() {
            for c in cell_range(pieces[i].bbox()) {
                for &j in &buckets[c] {
                    consider(j, &mut out);
                }
            }
            for &j in &unbounded {
                consider(j, &mut out);
            }
        } else {
            for j in i + 1..n {
                consider(j, &mut out);
            }
        }
    }
    out
}

/// Overlay of the Voronoi tessellations of the color classes in `tau`,
/// computed without the chromatic mosaic.
pub fn oracle_overlay(points: &PointSet, chi: &Coloring, tau: &[usize]) -> Result<OverlayGraph> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    tau.dedup();
    match points.dim {
        1 => arrangement_overlay_1d(points, chi, &tau),
        2 => {
            let skeletons = tau
                .iter()
                .map(|&j| voronoi_skeleton(&points.subset(&chi.class(j)), j))
                .collect::<Result<Vec<_>>>()?;
            arrangement_overlay_2d(&skeletons, points.periodic)
        }
        d => Err(Error::Unsupported(format!("arrangement overlay in dimension {d}"))),
    }
}

/// Overlay on the line (or circle): the union of the midpoints between
/// consecutive points of each class.
pub fn arrangement_overlay_1d(points: &PointSet, chi: &Coloring, tau: &[usize]) -> Result<OverlayGraph> {
    if points.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: points.dim });
    }
    let periodic = points.periodic;
    let width = chi.s + 1;
    let mut marks: Vec<(f64, usize)> = Vec::new();
    for &j in tau {
        let mut xs: Vec<f64> = chi.class(j).iter().map(|&i| points.points[i].coords[0]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        for w in xs.windows(2) {
            marks.push(((w[0] + w[1]) / 2.0, j));
        }
        if periodic && !xs.is_empty() {
            marks.push((reduce((xs[xs.len() - 1] + xs[0] + 1.0) / 2.0), j));
        }
    }
    marks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vertices: Vec<OverlayVertex> = marks
        .iter()
        .map(|&(x, j)| {
            let mut signature = vec![0u32; width];
            signature[j] = 1;
            OverlayVertex { position: vec![x], kind: VertexKind::Mono(j), signature }
        })
        .collect();
    let v = vertices.len();
    let mut edges = Vec::new();
    for i in 0..v.saturating_sub(1) {
        edges.push(OverlayEdge { ends: [Some(i), Some(i + 1)], color: 0, tangent: vec![marks[i + 1].0 - marks[i].0] });
    }
    if periodic {
        if v > 0 {
            edges.push(OverlayEdge { ends: [Some(v - 1), Some(0)], color: 0, tangent: vec![marks[0].0 + 1.0 - marks[v - 1].0] });
        }
    } else if v > 0 {
        edges.push(OverlayEdge { ends: [Some(0), None], color: 0, tangent: vec![-1.0] });
        edges.push(OverlayEdge { ends: [Some(v - 1), None], color: 0, tangent: vec![1.0] });
    } else {
        edges.push(OverlayEdge { ends: [None, None], color: 0, tangent: vec![1.0] });
    }
    let e = edges.len();
    Ok(OverlayGraph { d: 1, colors: tau.to_vec(), vertices, edges, counts: vec![v, e], periodic })
}
