//! Delaunay mosaics in any dimension, bounded or periodic.
//!
//! Cells are stored as [`FaceKey`]s: sorted lists of [`VertexRef`]s, each a
//! vertex position plus an integer lattice shift along the periodic axes
//! (always zero for bounded mosaics). Combinatorics come from exact,
//! symbolically perturbed predicates, so every mosaic is simplicial.

mod periodic;
mod triangulation;

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational;
use crate::geometry::{PointD, PointSet};
use triangulation::Triangulation;

pub use periodic::{delaunay_periodic, delaunay_periodic_axes, PeriodicOptions};

/// Largest supported number of periodic axes.
pub const MAX_TORUS_RANK: usize = 3;

/// Lattice translation of a vertex along the periodic axes.
pub type Shift = [i8; MAX_TORUS_RANK];

pub const ZERO_SHIFT: Shift = [0; MAX_TORUS_RANK];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexRef {
    pub vertex: usize,
    pub shift: Shift,
}

impl VertexRef {
    pub fn new(vertex: usize) -> Self {
        VertexRef { vertex, shift: ZERO_SHIFT }
    }
}

/// A face as a sorted list of `p + 1` vertex references.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceKey(Vec<VertexRef>);

impl FaceKey {
    pub fn new(mut refs: Vec<VertexRef>) -> Self {
        refs.sort_unstable();
        FaceKey(refs)
    }

    /// Face of a bounded mosaic from plain vertex positions.
    pub fn bounded(vertices: &[usize]) -> Self {
        FaceKey::new(vertices.iter().map(|&v| VertexRef::new(v)).collect())
    }

    pub fn refs(&self) -> &[VertexRef] {
        &self.0
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|r| r.vertex)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension `p` of the face.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Translate so that the smallest reference to the smallest vertex has
    /// zero shift. Identity on bounded faces.
    pub fn canonical(&self) -> FaceKey {
        let Some(first) = self.0.first() else {
            return self.clone();
        };
        let t = first.shift;
        if t == ZERO_SHIFT {
            return self.clone();
        }
        FaceKey(
            self.0
                .iter()
                .map(|r| {
                    let mut shift = r.shift;
                    for (s, o) in shift.iter_mut().zip(t) {
                        *s -= o;
                    }
                    VertexRef { vertex: r.vertex, shift }
                })
                .collect(),
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.0.first().is_none_or(|r| r.shift == ZERO_SHIFT)
    }

    /// All sub-faces with `q + 1` vertices, canonicalized.
    pub fn subfaces(&self, q: usize) -> Vec<FaceKey> {
        let n = self.0.len();
        let k = q + 1;
        if k > n {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let key = FaceKey(pick.iter().map(|&i| self.0[i]).collect());
            out.push(key.canonical());
            let Some(i) = (0..k).rev().find(|&i| pick[i] < n - k + i) else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
        out
    }

    /// The facet opposite the reference at position `slot`.
    pub fn facet(&self, slot: usize) -> FaceKey {
        self.facet_raw(slot).canonical()
    }

    /// As [`FaceKey::facet`], keeping the shifts of this translate.
    pub fn facet_raw(&self, slot: usize) -> FaceKey {
        FaceKey(self.0.iter().enumerate().filter(|&(i, _)| i != slot).map(|(_, &r)| r).collect())
    }
}

/// A simplicial mosaic: vertices, top-dimensional cells, facet adjacency, and
/// one circumcenter per cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplicialMosaic {
    pub dimension: usize,
    pub vertices: Vec<PointD>,
    pub cells: Vec<FaceKey>,
    /// `adjacency[c][i]` is the cell across the facet opposite reference `i`
    /// of cell `c`, or `None` on the boundary.
    pub adjacency: Vec<Vec<Option<usize>>>,
    pub circumcenters: Vec<PointD>,
    /// Cells whose circumcenter needed the exact rational solve.
    pub flagged: Vec<usize>,
    /// Coordinate axes identified modulo 1; empty for bounded mosaics.
    pub periodic_axes: Vec<usize>,
}

impl SimplicialMosaic {
    pub fn is_periodic(&self) -> bool {
        !self.periodic_axes.is_empty()
    }

    /// Coordinates of a vertex reference, unrolled by its shift.
    pub fn coords(&self, r: VertexRef) -> Vec<f64> {
        let mut c = self.vertices[r.vertex].coords.clone();
        for (k, &axis) in self.periodic_axes.iter().enumerate() {
            c[axis] += r.shift[k] as f64;
        }
        c
    }

    pub fn face_coords(&self, face: &FaceKey) -> Vec<Vec<f64>> {
        face.refs().iter().map(|&r| self.coords(r)).collect()
    }

    /// The cell across facet `slot` of cell `c`: its index, the slot of the
    /// shared facet in it, and the lattice shift that carries it onto the
    /// side of `c`.
    pub fn across(&self, c: usize, slot: usize) -> Option<(usize, usize, Shift)> {
        let n = self.adjacency[c][slot]?;
        let raw = self.cells[c].facet_raw(slot);
        let key = raw.canonical();
        for s2 in 0..self.cells[n].len() {
            if n == c && s2 == slot {
                continue;
            }
            let raw2 = self.cells[n].facet_raw(s2);
            if raw2.canonical() == key {
                let mut t = ZERO_SHIFT;
                let (a, b) = (raw.refs()[0].shift, raw2.refs()[0].shift);
                for k in 0..MAX_TORUS_RANK {
                    t[k] = a[k] - b[k];
                }
                return Some((n, s2, t));
            }
        }
        None
    }

    /// Alternating sum of face counts.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dimension)
            .map(|p| {
                let n = faces(self, p).len() as i64;
                if p % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    fn finish(
        dimension: usize,
        vertices: Vec<PointD>,
        cells: Vec<FaceKey>,
        adjacency: Vec<Vec<Option<usize>>>,
        periodic_axes: Vec<usize>,
    ) -> Result<Self> {
        let mut m = SimplicialMosaic {
            dimension,
            vertices,
            cells,
            adjacency,
            circumcenters: Vec::new(),
            flagged: Vec::new(),
            periodic_axes,
        };
        let mut centers = Vec::with_capacity(m.cells.len());
        for (c, cell) in m.cells.iter().enumerate() {
            let (center, exact) = solve_circumcenter(&m.face_coords(cell))?;
            if exact {
                m.flagged.push(c);
            }
            centers.push(PointD::new(c, center));
        }
        m.circumcenters = centers;
        Ok(m)
    }
}

/// Removes exact coordinate duplicates. Under the height perturbation the
/// copy with the smaller index is lifted higher and never reaches the lower
/// hull, so the copy with the largest index is kept.
fn distinct_positions(points: &[PointD]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let pa = &points[a];
        let pb = &points[b];
        pa.coords
            .iter()
            .zip(&pb.coords)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(pa.index.cmp(&pb.index))
    });
    let mut keep = Vec::with_capacity(points.len());
    for (i, &p) in order.iter().enumerate() {
        let next_same = order.get(i + 1).is_some_and(|&q| points[q].coords == points[p].coords);
        if !next_same {
            keep.push(p);
        }
    }
    keep.sort_unstable();
    keep
}

/// Delaunay mosaic of a finite point set in `R^d` under the index-keyed
/// symbolic perturbation. Points that coincide with a larger-index point are
/// kept as vertices of the mosaic but belong to no cell.
pub fn delaunay(points: &PointSet) -> Result<SimplicialMosaic> {
    delaunay_seeded(points, 0)
}

/// As [`delaunay`], with an explicit insertion-order seed. The result does not
/// depend on the seed.
pub fn delaunay_seeded(points: &PointSet, seed: u64) -> Result<SimplicialMosaic> {
    points.validate()?;
    let d = points.dim;
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let keep = distinct_positions(&points.points);
    if keep.len() < d + 1 {
        return Err(Error::TooFewPoints { needed: d + 1, found: keep.len() });
    }
    let mut coords = Vec::with_capacity(keep.len() * d);
    for &p in &keep {
        coords.extend_from_slice(&points.points[p].coords);
    }
    let ids = keep.iter().map(|&p| points.points[p].index).collect();
    let tri = Triangulation::build(d, coords, ids, seed)?;
    let finite = tri.finite_cells();
    let mut cells = Vec::with_capacity(finite.len());
    let mut adjacency = Vec::with_capacity(finite.len());
    for fc in finite {
        let mut slots: Vec<(usize, Option<usize>)> =
            fc.vertices.iter().map(|&v| keep[v]).zip(fc.neighbors).collect();
        slots.sort_unstable_by_key(|s| s.0);
        let verts: Vec<usize> = slots.iter().map(|s| s.0).collect();
        cells.push(FaceKey::bounded(&verts));
        adjacency.push(slots.into_iter().map(|s| s.1).collect());
    }
    SimplicialMosaic::finish(d, points.points.clone(), cells, adjacency, Vec::new())
}

/// Mosaic made of one simplex on at most `d` affinely independent points;
/// its dimension is below the ambient one.
pub(crate) fn single_simplex(points: &PointSet) -> Result<SimplicialMosaic> {
    points.validate()?;
    let n = points.len();
    if n == 0 || n > points.dim + 1 {
        return Err(Error::InvalidInput("a single simplex needs 1 to d+1 points".into()));
    }
    let pts: Vec<&[f64]> = points.points.iter().map(|p| p.coords.as_slice()).collect();
    if crate::exact::affine_rank(&pts) != n - 1 {
        return Err(Error::AffinelyDependent);
    }
    let verts: Vec<usize> = (0..n).collect();
    let cell = FaceKey::bounded(&verts);
    SimplicialMosaic::finish(n - 1, points.points.clone(), vec![cell], vec![vec![None; n]], Vec::new())
}

/// All `p`-faces of the mosaic, deduplicated (modulo lattice translation for
/// periodic mosaics) and sorted.
pub fn faces(m: &SimplicialMosaic, p: usize) -> Vec<FaceKey> {
    if p > m.dimension {
        return Vec::new();
    }
    if p == m.dimension {
        let mut out = m.cells.clone();
        out.sort_unstable();
        return out;
    }
    let mut out: Vec<FaceKey> = m.cells.iter().flat_map(|c| c.subfaces(p)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of `p`-faces for every `p`, with each face's multiplicity among
/// cells discarded.
pub fn face_counts(m: &SimplicialMosaic) -> Vec<usize> {
    (0..=m.dimension).map(|p| faces(m, p).len()).collect()
}

/// Circumcenter of cell `cell`.
pub fn circumcenter(m: &SimplicialMosaic, cell: usize) -> Result<PointD> {
    m.circumcenters
        .get(cell)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("no cell {cell}")))
}

/// Smallest ratio of pivot magnitudes accepted before switching to exact
/// arithmetic.
const PIVOT_RATIO: f64 = 1e-10;

/// Center of the sphere through `pts` (`d + 1` points in `R^d`). Returns the
/// center and whether the exact path was taken.
pub fn solve_circumcenter(pts: &[Vec<f64>]) -> Result<(Vec<f64>, bool)> {
    let d = pts.len().saturating_sub(1);
    let ambient = pts.first().map_or(0, Vec::len);
    if pts.iter().any(|p| p.len() != ambient) || ambient < d {
        return Err(Error::DimensionMismatch { expected: d, found: ambient });
    }
    if d == 0 {
        return Ok((pts.first().cloned().unwrap_or_default(), false));
    }
    if ambient > d {
        return circumcenter_in_flat(pts);
    }
    let p0 = &pts[0];
    let mut a = vec![vec![0.0; d + 1]; d];
    for i in 0..d {
        let diff: Vec<f64> = pts[i + 1].iter().zip(p0).map(|(x, y)| x - y).collect();
        a[i][d] = diff.iter().map(|x| x * x).sum();
        for j in 0..d {
            a[i][j] = 2.0 * diff[j];
        }
    }
    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;
    for col in 0..d {
        let p = (col..d)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, p);
        let piv = a[col][col];
        max_pivot = max_pivot.max(piv.abs());
        min_pivot = min_pivot.min(piv.abs());
        if piv == 0.0 {
            break;
        }
        for r in col + 1..d {
            let f = a[r][col] / piv;
            if f != 0.0 {
                for j in col..=d {
                    a[r][j] -= f * a[col][j];
                }
            }
        }
    }
    if min_pivot == 0.0 || min_pivot < PIVOT_RATIO * max_pivot {
        return circumcenter_exact(pts).map(|c| (c, true));
    }
    let mut y = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = a[i][d];
        for j in i + 1..d {
            s -= a[i][j] * y[j];
        }
        y[i] = s / a[i][i];
    }
    Ok((y.iter().zip(p0).map(|(a, b)| a + b).collect(), false))
}

fn circumcenter_exact(pts: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = pts.len() - 1;
    let q: Vec<Vec<BigRational>> = pts.iter().map(|p| p.iter().map(|&x| rational(x)).collect()).collect();
    let two = BigRational::from_integer(2.into());
    let mut a: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let diff: Vec<BigRational> = q[i + 1].iter().zip(&q[0]).map(|(x, y)| x - y).collect();
            let rhs = diff.iter().fold(BigRational::zero(), |s, x| s + x * x);
            let mut row: Vec<BigRational> = diff.iter().map(|x| &two * x).collect();
            row.push(rhs);
            row
        })
        .collect();
    for col in 0..d {
        let p = (col..d).find(|&r| !a[r][col].is_zero()).ok_or(Error::DegenerateSimplex)?;
        a.swap(col, p);
        for r in 0..d {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for j in col..=d {
                let v = &f * &a[col][j];
                a[r][j] -= v;
            }
        }
    }
    Ok((0..d)
        .map(|i| {
            let y = &a[i][d] / &a[i][i];
            (y + &q[0][i]).to_f64().unwrap_or(f64::NAN)
        })
        .collect())
}

/// Center of the sphere through `k + 1 <= D` points within their affine hull,
/// as `p_0 + sum_i l_i (p_i - p_0)` with `2 G l = diag(G)` for the Gram
/// matrix `G`.
fn circumcenter_in_flat(pts: &[Vec<f64>]) -> Result<(Vec<f64>, bool)> {
    let k = pts.len() - 1;
    let q: Vec<Vec<BigRational>> = pts.iter().map(|p| p.iter().map(|&x| rational(x)).collect()).collect();
    let diffs: Vec<Vec<BigRational>> = q[1..].iter().map(|p| p.iter().zip(&q[0]).map(|(x, y)| x - y).collect()).collect();
    let dot = |a: &[BigRational], b: &[BigRational]| a.iter().zip(b).fold(BigRational::zero(), |s, (x, y)| s + x * y);
    let two = BigRational::from_integer(2.into());
    let mut a: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| &two * dot(&diffs[i], &diffs[j])).collect();
            row.push(dot(&diffs[i], &diffs[i]));
            row
        })
        .collect();
    for col in 0..k {
        let p = (col..k).find(|&r| !a[r][col].is_zero()).ok_or(Error::DegenerateSimplex)?;
        a.swap(col, p);
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for j in col..=k {
                let v = &f * &a[col][j];
                a[r][j] -= v;
            }
        }
    }
    let lambda: Vec<BigRational> = (0..k).map(|i| &a[i][k] / &a[i][i]).collect();
    let center = (0..pts[0].len())
        .map(|c| {
            let v = lambda.iter().zip(&diffs).fold(q[0][c].clone(), |s, (l, dv)| s + l * &dv[c]);
            v.to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    Ok((center, false))
}

/// Checks that every facet is shared by at most two cells, interior facets
/// by exactly two, and that adjacency is symmetric.
pub fn check_facets(m: &SimplicialMosaic) -> Result<()> {
    let mut seen: HashMap<FaceKey, usize> = HashMap::new();
    for cell in &m.cells {
        for slot in 0..cell.len() {
            *seen.entry(cell.facet(slot)).or_default() += 1;
        }
    }
    if seen.values().any(|&c| c > 2) {
        return Err(Error::InvalidInput("facet shared by more than two cells".into()));
    }
    for (c, nbrs) in m.adjacency.iter().enumerate() {
        for (slot, n) in nbrs.iter().enumerate() {
            let facet = m.cells[c].facet(slot);
            match n {
                Some(n) => {
                    if !m.adjacency[*n].contains(&Some(c)) {
                        return Err(Error::InvalidInput("asymmetric adjacency".into()));
                    }
                }
                None => {
                    if seen[&facet] != 1 {
                        return Err(Error::InvalidInput("boundary facet used twice".into()));
                    }
                }
            }
        }
    }
    Ok(())
}
