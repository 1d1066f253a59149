//! Incremental Delaunay triangulation in any dimension.
//!
//! The triangulation is closed with a vertex at infinity: every facet on the
//! convex hull carries an infinite cell. A query conflicts with an infinite
//! cell when it lies strictly beyond the hull facet; when it lies on the
//! facet's hyperplane it conflicts iff it is inside the facet's circumsphere
//! within that hyperplane, which equals the in-sphere test against the finite
//! neighbor (every sphere through the facet cuts the hyperplane in the same
//! sphere).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exact;
use crate::geometry::Sign;
use crate::predicates::{insphere_perturbed_coords, orient_coords};

pub(crate) const INF: usize = usize::MAX;
const NONE: usize = usize::MAX;
/// Largest supported dimension plus one.
const MAX_WIDTH: usize = 9;
type Ridge = [usize; MAX_WIDTH];

pub(crate) struct Triangulation {
    pub dim: usize,
    coords: Vec<f64>,
    ids: Vec<usize>,
    cells: Vec<usize>,
    nbrs: Vec<usize>,
    orient: Vec<Sign>,
    alive: Vec<bool>,
    free: Vec<usize>,
    vertex_cell: Vec<usize>,
    stamp: Vec<u32>,
    verdict: Vec<bool>,
    generation: u32,
    visit: Vec<u32>,
    visit_generation: u32,
}

/// A finite cell of a finished triangulation: vertex ids and, per slot, the
/// finite neighbor across the opposite facet (None on the hull).
pub(crate) struct FiniteCell {
    pub vertices: Vec<usize>,
    pub neighbors: Vec<Option<usize>>,
}

impl Triangulation {
    fn point(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    fn width(&self) -> usize {
        self.dim + 1
    }

    fn cell(&self, c: usize) -> &[usize] {
        let w = self.width();
        &self.cells[c * w..(c + 1) * w]
    }

    fn nbr(&self, c: usize, slot: usize) -> usize {
        self.nbrs[c * self.width() + slot]
    }

    fn set_nbr(&mut self, c: usize, slot: usize, n: usize) {
        let w = self.width();
        self.nbrs[c * w + slot] = n;
    }

    fn is_infinite(&self, c: usize) -> bool {
        self.cell(c).contains(&INF)
    }

    fn alloc_cell(&mut self, verts: &[usize]) -> usize {
        let orient = if verts.contains(&INF) {
            Sign::Zero
        } else {
            let mut buf: [&[f64]; MAX_WIDTH] = [&[]; MAX_WIDTH];
            for (b, &v) in buf.iter_mut().zip(verts) {
                *b = self.point(v);
            }
            orient_coords(&buf[..verts.len()])
        };
        let w = self.width();
        let c = if let Some(c) = self.free.pop() {
            self.cells[c * w..(c + 1) * w].copy_from_slice(verts);
            self.nbrs[c * w..(c + 1) * w].fill(NONE);
            self.orient[c] = orient;
            self.alive[c] = true;
            c
        } else {
            self.cells.extend_from_slice(verts);
            self.nbrs.extend(std::iter::repeat(NONE).take(w));
            self.orient.push(orient);
            self.alive.push(true);
            self.stamp.push(0);
            self.verdict.push(false);
            self.visit.push(0);
            self.alive.len() - 1
        };
        for &v in verts {
            if v != INF {
                self.vertex_cell[v] = c;
            }
        }
        c
    }

    /// Triangulates `coords` (flat, `dim` per point); `ids` key the
    /// symbolic perturbation. Insertion order is a seeded shuffle refined by
    /// spatial sorting within doubling rounds.
    pub fn build(dim: usize, coords: Vec<f64>, ids: Vec<usize>, seed: u64) -> Result<Self> {
        let n = ids.len();
        if dim + 1 > MAX_WIDTH {
            return Err(Error::Unsupported(format!("triangulation in dimension {dim}")));
        }
        if n < dim + 1 {
            return Err(Error::TooFewPoints { needed: dim + 1, found: n });
        }
        let mut t = Triangulation {
            dim,
            coords,
            ids,
            cells: Vec::new(),
            nbrs: Vec::new(),
            orient: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            vertex_cell: vec![NONE; n],
            stamp: Vec::new(),
            verdict: Vec::new(),
            generation: 0,
            visit: Vec::new(),
            visit_generation: 0,
        };
        let order = t.insertion_order(seed);
        let first = t.initial_simplex(&order)?;
        t.seed_simplex(&first);
        let mut last = first[0];
        for &v in &order {
            if first.contains(&v) {
                continue;
            }
            t.insert(v, last)?;
            last = v;
        }
        Ok(t)
    }

    fn insertion_order(&self, seed: u64) -> Vec<usize> {
        let n = self.ids.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let d = self.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in 0..n {
            for (k, &x) in self.point(v).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let bits = (60 / d.max(1)).min(16) as u32;
        let cells = (1u64 << bits) as f64;
        let key = |v: usize| -> u64 {
            let q: Vec<u64> = self
                .point(v)
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let span = hi[k] - lo[k];
                    if span > 0.0 {
                        (((x - lo[k]) / span) * (cells - 1.0)) as u64
                    } else {
                        0
                    }
                })
                .collect();
            let mut code = 0u64;
            for b in (0..bits).rev() {
                for &c in &q {
                    code = (code << 1) | ((c >> b) & 1);
                }
            }
            code
        };
        // doubling rounds, each sorted along a Morton curve
        let mut start = 0;
        let mut size = 64.min(n);
        while start < n {
            let end = (start + size).min(n);
            order[start..end].sort_by_cached_key(|&v| key(v));
            start = end;
            size *= 2;
        }
        order
    }

    fn initial_simplex(&self, order: &[usize]) -> Result<Vec<usize>> {
        let mut chosen = vec![order[0]];
        for &v in &order[1..] {
            if chosen.len() == self.dim + 1 {
                break;
            }
            let mut pts: Vec<&[f64]> = chosen.iter().map(|&c| self.point(c)).collect();
            pts.push(self.point(v));
            if exact::affine_rank(&pts) == chosen.len() {
                chosen.push(v);
            } else if chosen.len() == 1 && self.point(v) == self.point(chosen[0]) {
                return Err(Error::DuplicatePoint { first: self.ids[chosen[0]], second: self.ids[v] });
            }
        }
        if chosen.len() < self.dim + 1 {
            return Err(Error::AffinelyDependent);
        }
        Ok(chosen)
    }

    fn seed_simplex(&mut self, verts: &[usize]) {
        let d = self.dim;
        let finite = self.alloc_cell(verts);
        let mut inf_cells = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut v = verts.to_vec();
            v[i] = INF;
            inf_cells.push(self.alloc_cell(&v));
        }
        for i in 0..=d {
            self.set_nbr(finite, i, inf_cells[i]);
            self.set_nbr(inf_cells[i], i, finite);
            for j in 0..=d {
                if j != i {
                    self.set_nbr(inf_cells[i], j, inf_cells[j]);
                }
            }
        }
    }

    fn conflicts(&self, c: usize, q: usize) -> bool {
        let verts = self.cell(c);
        let w = verts.len();
        let qp = self.point(q);
        let mut pts: [&[f64]; MAX_WIDTH] = [&[]; MAX_WIDTH];
        if let Some(slot) = verts.iter().position(|&v| v == INF) {
            let finite = self.nbr(c, slot);
            let fverts = self.cell(finite);
            let apex = *fverts.iter().find(|v| !verts.contains(v)).expect("apex");
            for (p, &v) in pts.iter_mut().zip(verts) {
                *p = if v == INF { qp } else { self.point(v) };
            }
            let side_q = orient_coords(&pts[..w]);
            if side_q == Sign::Zero {
                return self.conflicts(finite, q);
            }
            pts[slot] = self.point(apex);
            let side_apex = orient_coords(&pts[..w]);
            side_q != side_apex
        } else {
            let mut idx = [0usize; MAX_WIDTH];
            for ((p, i), &v) in pts.iter_mut().zip(idx.iter_mut()).zip(verts) {
                *p = self.point(v);
                *i = self.ids[v];
            }
            insphere_perturbed_coords(&pts[..w], &idx[..w], self.orient[c], qp, self.ids[q]) == Sign::Positive
        }
    }

    /// Cells incident to finite vertex `v`.
    fn star(&mut self, v: usize, out: &mut Vec<usize>) {
        self.visit_generation += 1;
        let gen = self.visit_generation;
        let start = self.vertex_cell[v];
        out.clear();
        out.push(start);
        self.visit[start] = gen;
        let mut i = 0;
        while i < out.len() {
            let c = out[i];
            i += 1;
            for slot in 0..self.width() {
                if self.cell(c)[slot] == v {
                    continue;
                }
                let n = self.nbr(c, slot);
                if self.visit[n] != gen {
                    self.visit[n] = gen;
                    out.push(n);
                }
            }
        }
    }

    fn sq_dist(&self, a: usize, b: usize) -> f64 {
        self.point(a).iter().zip(self.point(b)).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    fn locate(&mut self, q: usize, hint: usize) -> Result<usize> {
        let mut s = hint;
        let mut best = self.sq_dist(s, q);
        let mut star = Vec::new();
        loop {
            self.star(s, &mut star);
            let mut next = None;
            for &c in &star {
                for &w in self.cell(c) {
                    if w == INF || w == s {
                        continue;
                    }
                    let dist = self.sq_dist(w, q);
                    if dist < best {
                        best = dist;
                        next = Some(w);
                    }
                }
            }
            match next {
                Some(w) => s = w,
                None => {
                    if best == 0.0 {
                        return Err(Error::DuplicatePoint { first: self.ids[s], second: self.ids[q] });
                    }
                    if let Some(&c) = star.iter().find(|&&c| self.conflicts(c, q)) {
                        return Ok(c);
                    }
                    break;
                }
            }
        }
        (0..self.alive.len())
            .find(|&c| self.alive[c] && self.conflicts(c, q))
            .ok_or_else(|| Error::InvalidInput("point location failed".into()))
    }

    fn insert(&mut self, q: usize, hint: usize) -> Result<()> {
        let start = self.locate(q, hint)?;
        self.generation += 1;
        let gen = self.generation;
        let w = self.width();
        let mut cavity = vec![start];
        self.stamp[start] = gen;
        self.verdict[start] = true;
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < cavity.len() {
            let c = cavity[i];
            i += 1;
            for slot in 0..w {
                let n = self.nbr(c, slot);
                if self.stamp[n] != gen {
                    self.stamp[n] = gen;
                    let hit = self.conflicts(n, q);
                    self.verdict[n] = hit;
                    if hit {
                        cavity.push(n);
                    }
                }
                if !self.verdict[n] {
                    boundary.push((c, slot));
                }
            }
        }
        let mut ridges: FxHashMap<Ridge, (usize, usize)> =
            FxHashMap::with_capacity_and_hasher(boundary.len() * w, Default::default());
        let mut created = Vec::with_capacity(boundary.len());
        for &(c, slot) in &boundary {
            let outside = self.nbr(c, slot);
            let mut verts: [usize; MAX_WIDTH] = [NONE; MAX_WIDTH];
            verts[..w].copy_from_slice(self.cell(c));
            verts[slot] = q;
            let verts = &verts[..w];
            let nc = self.alloc_cell(verts);
            if !verts.contains(&INF) && self.orient[nc] == Sign::Zero {
                return Err(Error::InvalidInput(format!(
                    "flat cell created while inserting point {}",
                    self.ids[q]
                )));
            }
            self.set_nbr(nc, slot, outside);
            let back = (0..w).find(|&s| self.nbr(outside, s) == c).expect("mutual adjacency");
            self.set_nbr(outside, back, nc);
            created.push((nc, slot));
            for j in 0..w {
                if j == slot {
                    continue;
                }
                let mut key: Ridge = [NONE; MAX_WIDTH];
                let mut len = 0;
                for (k, &v) in verts.iter().enumerate() {
                    if k != j && k != slot {
                        key[len] = v;
                        len += 1;
                    }
                }
                key[..len].sort_unstable();
                if let Some((other, oslot)) = ridges.remove(&key) {
                    self.set_nbr(nc, j, other);
                    self.set_nbr(other, oslot, nc);
                } else {
                    ridges.insert(key, (nc, j));
                }
            }
        }
        debug_assert!(ridges.is_empty(), "cavity boundary is not a closed sphere");
        for c in cavity {
            self.alive[c] = false;
            self.free.push(c);
        }
        Ok(())
    }

    pub fn finite_cells(&self) -> Vec<FiniteCell> {
        let mut map = vec![NONE; self.alive.len()];
        let mut out = Vec::new();
        for c in 0..self.alive.len() {
            if self.alive[c] && !self.is_infinite(c) {
                map[c] = out.len();
                out.push(c);
            }
        }
        out.iter()
            .map(|&c| {
                let vertices = self.cell(c).to_vec();
                let neighbors = (0..self.width())
                    .map(|s| {
                        let n = self.nbr(c, s);
                        (map[n] != NONE).then_some(map[n])
                    })
                    .collect();
                FiniteCell { vertices, neighbors }
            })
            .collect()
    }
}
