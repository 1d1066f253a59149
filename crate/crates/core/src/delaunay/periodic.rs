//! Periodic Delaunay mosaics by lattice replication.
//!
//! Points are copied by integer offsets along the periodic axes, the copies
//! are triangulated, and one translate of every cell is kept: the one whose
//! smallest vertex reference is unshifted. A cell is trusted only if its
//! circumsphere meets the point layers inside the replicated window, and the
//! kept cells must close up (every facet shared by two cells modulo the
//! lattice). Failing either check widens the window.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{PointD, PointSet, Sign};
use crate::predicates::orient_coords;

use super::triangulation::Triangulation;
use super::{FaceKey, Shift, SimplicialMosaic, VertexRef, MAX_TORUS_RANK, ZERO_SHIFT};

#[derive(Clone, Debug)]
pub struct PeriodicOptions {
    /// Copies are kept while their periodic coordinates lie in
    /// `[-margin, 1 + margin]`. `1.0` keeps all `3^k` offsets.
    pub margin: f64,
    /// Retry with a wider window (finally `5^k` offsets) when a check fails.
    pub escalate: bool,
    /// Rebuild with `5^k` offsets and require the same cells.
    pub compare_escalation: bool,
    pub seed: u64,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions { margin: 1.0, escalate: true, compare_escalation: false, seed: 0 }
    }
}

/// Periodic Delaunay mosaic with the first `k` axes identified modulo 1.
pub fn delaunay_periodic(points: &PointSet, k: usize) -> Result<SimplicialMosaic> {
    let axes: Vec<usize> = (0..k).collect();
    delaunay_periodic_axes(points, &axes, &PeriodicOptions::default())
}

/// Periodic Delaunay mosaic with the listed axes identified modulo 1.
pub fn delaunay_periodic_axes(points: &PointSet, axes: &[usize], opts: &PeriodicOptions) -> Result<SimplicialMosaic> {
    let k = axes.len();
    let d = points.dim;
    PointSet { periodic: false, ..points.clone() }.validate()?;
    if k == 0 || k > MAX_TORUS_RANK || k > d {
        return Err(Error::Unsupported(format!("torus rank {k} in dimension {d}")));
    }
    if axes.iter().any(|&a| a >= d) || (1..k).any(|i| axes[..i].contains(&axes[i])) {
        return Err(Error::InvalidInput("invalid periodic axes".into()));
    }
    for p in &points.points {
        if axes.iter().any(|&a| !(0.0..1.0).contains(&p.coords[a])) {
            return Err(Error::InvalidInput(format!("periodic point {} lies outside [0,1)", p.index)));
        }
    }
    let base = quantized(points, axes);
    let mut attempts = vec![(1i8, opts.margin.clamp(0.0, 1.0))];
    if opts.escalate {
        if opts.margin < 1.0 {
            attempts.push((1, 1.0));
        }
        attempts.push((2, 2.0));
    }
    let mut result = None;
    for (range, margin) in attempts {
        if let Some(m) = attempt(&base, axes, range, margin, opts.seed)? {
            result = Some(m);
            break;
        }
    }
    let m = result.ok_or(Error::ReplicationInsufficient)?;
    if opts.compare_escalation {
        let wide = attempt(&base, axes, 2, 2.0, opts.seed)?.ok_or(Error::ReplicationInsufficient)?;
        let mut a = m.cells.clone();
        let mut b = wide.cells;
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::ReplicationInsufficient);
        }
    }
    Ok(m)
}

/// Snaps periodic coordinates to multiples of `2^-51` so that every integer
/// translate up to 2 is exact in `f64`.
fn quantized(points: &PointSet, axes: &[usize]) -> Vec<PointD> {
    let grid = (2.0f64).powi(51);
    points
        .points
        .iter()
        .map(|p| {
            let mut c = p.coords.clone();
            for &a in axes {
                c[a] = (c[a] * grid).floor() / grid;
            }
            PointD::new(p.index, c)
        })
        .collect()
}

fn offsets(k: usize, range: i8) -> Vec<Shift> {
    let mut out = vec![ZERO_SHIFT];
    for axis in 0..k {
        out = out
            .into_iter()
            .flat_map(|s| {
                (-range..=range).map(move |o| {
                    let mut t = s;
                    t[axis] = o;
                    t
                })
            })
            .collect();
    }
    out
}

/// Perturbation rank of a copy; lexicographic in (original index, shift), so
/// relative order is invariant under lattice translation.
fn replica_id(index: usize, shift: &Shift, k: usize) -> usize {
    let code = shift[..k].iter().fold(0usize, |acc, &s| acc * 5 + (s + 2) as usize);
    index * 5usize.pow(k as u32) + code
}

fn attempt(base: &[PointD], axes: &[usize], range: i8, margin: f64, seed: u64) -> Result<Option<SimplicialMosaic>> {
    let k = axes.len();
    let d = base.first().map_or(0, PointD::dim);
    let mut refs = Vec::new();
    let mut coords = Vec::new();
    let mut ids = Vec::new();
    for (v, p) in base.iter().enumerate() {
        for shift in offsets(k, range) {
            let mut c = p.coords.clone();
            let mut inside = true;
            for (i, &a) in axes.iter().enumerate() {
                c[a] += shift[i] as f64;
                inside &= c[a] >= -margin && c[a] <= 1.0 + margin;
            }
            if inside {
                refs.push(VertexRef { vertex: v, shift });
                coords.extend_from_slice(&c);
                ids.push(replica_id(p.index, &shift, k));
            }
        }
    }
    check_distinct(base)?;
    let tri = Triangulation::build(d, coords, ids, seed)?;
    let mut cells: Vec<FaceKey> = tri
        .finite_cells()
        .into_iter()
        .map(|fc| FaceKey::new(fc.vertices.iter().map(|&r| refs[r]).collect()))
        .filter(FaceKey::is_canonical)
        .collect();
    cells.sort_unstable();
    let layers = Layers::new(base, axes);
    let mosaic = SimplicialMosaic::finish(d, base.to_vec(), cells, Vec::new(), axes.to_vec())?;
    for (c, cell) in mosaic.cells.iter().enumerate() {
        let center = &mosaic.circumcenters[c].coords;
        let first = mosaic.coords(cell.refs()[0]);
        let r2 = crate::geometry::squared_distance(center, &first);
        if !layers.sphere_inside(center, r2, margin) {
            return Ok(None);
        }
    }
    match close_up(&mosaic)? {
        Some(adjacency) => Ok(Some(SimplicialMosaic { adjacency, ..mosaic })),
        None => Ok(None),
    }
}

fn check_distinct(base: &[PointD]) -> Result<()> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(base.len());
    for p in base {
        let key: Vec<u64> = p.coords.iter().map(|x| (x + 0.0).to_bits()).collect();
        if let Some(&first) = seen.get(&key) {
            return Err(Error::DuplicatePoint { first, second: p.index });
        }
        seen.insert(key, p.index);
    }
    Ok(())
}

/// Distinct values of the non-periodic coordinates. Points on few layers get
/// a per-layer window test; otherwise the whole sphere is tested.
struct Layers {
    free_axes: Vec<usize>,
    periodic_axes: Vec<usize>,
    values: Option<Vec<Vec<f64>>>,
}

const MAX_LAYERS: usize = 64;

impl Layers {
    fn new(base: &[PointD], axes: &[usize]) -> Self {
        let d = base.first().map_or(0, PointD::dim);
        let free_axes: Vec<usize> = (0..d).filter(|a| !axes.contains(a)).collect();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for p in base {
            let v: Vec<f64> = free_axes.iter().map(|&a| p.coords[a]).collect();
            if !values.contains(&v) {
                values.push(v);
                if values.len() > MAX_LAYERS {
                    break;
                }
            }
        }
        let values = (values.len() <= MAX_LAYERS).then_some(values);
        Layers { free_axes, periodic_axes: axes.to_vec(), values }
    }

    fn sphere_inside(&self, center: &[f64], r2: f64, margin: f64) -> bool {
        let slack = 1e-9;
        let fits = |rr: f64| {
            let r = rr.max(0.0).sqrt() * (1.0 + slack) + slack;
            self.periodic_axes
                .iter()
                .all(|&a| center[a] - r >= -margin && center[a] + r <= 1.0 + margin)
        };
        match &self.values {
            None => fits(r2),
            Some(values) => values.iter().all(|y| {
                let off: f64 = self.free_axes.iter().zip(y).map(|(&a, v)| (center[a] - v).powi(2)).sum();
                let rr = r2 - off;
                rr < -slack * r2.max(1.0) || fits(rr)
            }),
        }
    }
}

/// Adjacency of canonical cells, or `None` if some facet is not shared by
/// exactly two cells (facets parallel to every periodic axis may lie on the
/// boundary).
fn close_up(m: &SimplicialMosaic) -> Result<Option<Vec<Vec<Option<usize>>>>> {
    let mut owners: HashMap<FaceKey, Vec<(usize, usize)>> = HashMap::new();
    for (c, cell) in m.cells.iter().enumerate() {
        for slot in 0..cell.len() {
            owners.entry(cell.facet(slot)).or_default().push((c, slot));
        }
    }
    let mut adjacency: Vec<Vec<Option<usize>>> = m.cells.iter().map(|c| vec![None; c.len()]).collect();
    for (facet, own) in &owners {
        match own.as_slice() {
            [(a, sa), (b, sb)] => {
                adjacency[*a][*sa] = Some(*b);
                adjacency[*b][*sb] = Some(*a);
            }
            [_] if spans_periodic_axes(m, facet) => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(adjacency))
}

fn spans_periodic_axes(m: &SimplicialMosaic, facet: &FaceKey) -> bool {
    let pts = m.face_coords(facet);
    m.periodic_axes.iter().all(|&a| {
        let mut extra = pts[0].clone();
        extra[a] += 1.0;
        let mut all: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        all.push(&extra);
        orient_coords(&all) == Sign::Zero
    })
}
