//! The chromatic embedding: color class `j` is placed on the layer
//! `u_j + R^d` of `R^(s+d)`, and the Delaunay mosaic of the layered set is
//! annotated with per-face color signatures.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::delaunay::{self, faces, FaceKey, PeriodicOptions, Shift, SimplicialMosaic, VertexRef};
use crate::error::{Error, Result};
use crate::geometry::{PointD, PointSet};

/// A coloring of a point set by `{0, ..., s}`. `chi[i]` is the color of the
/// point at position `i` of the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub s: usize,
    pub chi: Vec<usize>,
}

impl Coloring {
    pub fn new(s: usize, chi: Vec<usize>) -> Result<Self> {
        if let Some(&c) = chi.iter().find(|&&c| c > s) {
            return Err(Error::InvalidInput(format!("color {c} exceeds s = {s}")));
        }
        Ok(Coloring { s, chi })
    }

    pub fn colors(&self) -> usize {
        self.s + 1
    }

    /// Positions of the points of color `j`.
    pub fn class(&self, j: usize) -> Vec<usize> {
        (0..self.chi.len()).filter(|&i| self.chi[i] == j).collect()
    }

    fn check(&self, points: &PointSet) -> Result<()> {
        if self.chi.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "coloring has {} entries for {} points",
                self.chi.len(),
                points.len()
            )));
        }
        if self.s > 31 {
            return Err(Error::Unsupported(format!("{} colors", self.s + 1)));
        }
        Ok(())
    }
}

/// Color multiplicities of a face.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColorSignature {
    pub counts: Vec<u32>,
}

impl ColorSignature {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Bit mask of the colors present.
    pub fn support(&self) -> u32 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(0, |m, (j, _)| m | (1 << j))
    }

    /// All colors belong to `tau` (a bit mask).
    pub fn is_colored(&self, tau: u32) -> bool {
        self.support() & !tau == 0
    }

    /// Colored by `tau` and using every color in it.
    pub fn is_colorful(&self, tau: u32) -> bool {
        self.support() == tau
    }
}

/// Bit mask of a color list.
pub fn color_mask(tau: &[usize]) -> u32 {
    tau.iter().fold(0, |m, &j| m | (1 << j))
}

/// Vertices `u_0 = 0, u_1, ..., u_s` of a regular simplex in `R^s` with
/// edge length `sqrt(2)`.
pub fn simplex_vertices(s: usize) -> Vec<PointD> {
    simplex_vertices_scaled(s, 1.0)
}

/// As [`simplex_vertices`], with all coordinates multiplied by `scale`.
///
/// `u_i` has the centroid of `u_0..u_{i-1}` in its first `i - 1`
/// coordinates and the height that puts it at distance `sqrt(2)` from them
/// in coordinate `i - 1`.
pub fn simplex_vertices_scaled(s: usize, scale: f64) -> Vec<PointD> {
    let mut us: Vec<Vec<f64>> = vec![vec![0.0; s]];
    for i in 1..=s {
        let mut u = vec![0.0; s];
        for (j, x) in u.iter_mut().enumerate().take(i - 1) {
            *x = us.iter().map(|p| p[j]).sum::<f64>() / i as f64;
        }
        let r2: f64 = u.iter().map(|x| x * x).sum();
        u[i - 1] = (2.0 - r2).sqrt();
        us.push(u);
    }
    us.into_iter()
        .enumerate()
        .map(|(j, u)| PointD::new(j, u.into_iter().map(|x| x * scale).collect()))
        .collect()
}

/// The layered set in `R^(s+d)`: `(u_chi(a), a)` for every point `a`, with
/// indices preserved. The result is never flagged periodic; the periodic
/// axes of a periodic input are `s..s+d`.
pub fn embed(points: &PointSet, chi: &Coloring) -> Result<PointSet> {
    embed_scaled(points, chi, 1.0)
}

pub fn embed_scaled(points: &PointSet, chi: &Coloring, scale: f64) -> Result<PointSet> {
    chi.check(points)?;
    let us = simplex_vertices_scaled(chi.s, scale);
    let pts = points
        .points
        .iter()
        .zip(&chi.chi)
        .map(|(p, &j)| {
            let mut c = us[j].coords.clone();
            c.extend_from_slice(&p.coords);
            PointD::new(p.index, c)
        })
        .collect();
    Ok(PointSet { dim: chi.s + points.dim, points: pts, periodic: false })
}

#[derive(Clone, Debug)]
pub struct ChromaticOptions {
    /// Multiplier on the simplex vertices.
    pub scale: f64,
    pub periodic: PeriodicOptions,
}

impl Default for ChromaticOptions {
    fn default() -> Self {
        ChromaticOptions { scale: 1.0, periodic: PeriodicOptions::default() }
    }
}

/// Chromatic Delaunay mosaic: the Delaunay mosaic of the layered set in
/// `R^(s+d)`, with vertex positions matching the input point positions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChromaticMosaic {
    pub s: usize,
    pub d: usize,
    pub base: SimplicialMosaic,
    /// Color of every vertex.
    pub colors: Vec<usize>,
}

impl ChromaticMosaic {
    /// Original point index and color of a vertex.
    pub fn origin(&self, vertex: usize) -> (usize, usize) {
        (self.base.vertices[vertex].index, self.colors[vertex])
    }

    pub fn signature(&self, face: &FaceKey) -> ColorSignature {
        let mut counts = vec![0u32; self.s + 1];
        for v in face.vertices() {
            counts[self.colors[v]] += 1;
        }
        ColorSignature { counts }
    }

    /// All `p`-faces with their signatures.
    pub fn faces_with_signatures(&self, p: usize) -> Vec<(FaceKey, ColorSignature)> {
        faces(&self.base, p)
            .into_iter()
            .map(|f| {
                let sig = self.signature(&f);
                (f, sig)
            })
            .collect()
    }

    /// Number of faces of every signature, over all dimensions.
    pub fn signature_counts(&self) -> BTreeMap<Vec<u32>, u64> {
        let mut out = BTreeMap::new();
        for p in 0..=self.base.dimension {
            for f in faces(&self.base, p) {
                *out.entry(self.signature(&f).counts).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn is_periodic(&self) -> bool {
        self.base.is_periodic()
    }
}

/// Chromatic Delaunay mosaic with default options. A periodic input gives a
/// periodic mosaic over the spatial axes.
pub fn chromatic_delaunay(points: &PointSet, chi: &Coloring) -> Result<ChromaticMosaic> {
    chromatic_delaunay_with(points, chi, &ChromaticOptions::default())
}

pub fn chromatic_delaunay_with(points: &PointSet, chi: &Coloring, opts: &ChromaticOptions) -> Result<ChromaticMosaic> {
    points.validate()?;
    let embedded = embed_scaled(points, chi, opts.scale)?;
    let base = if !points.periodic && embedded.len() <= embedded.dim {
        delaunay::single_simplex(&embedded)?
    } else if points.periodic {
        let axes: Vec<usize> = (chi.s..chi.s + points.dim).collect();
        delaunay::delaunay_periodic_axes(&embedded, &axes, &opts.periodic)?
    } else {
        delaunay::delaunay_seeded(&embedded, opts.periodic.seed)?
    };
    Ok(ChromaticMosaic { s: chi.s, d: points.dim, base, colors: chi.chi.clone() })
}

/// The subcomplex of `tau`-colored faces, with vertices re-expressed in
/// `R^(t+d)` by the `tau`-local simplex. Only vertices with a color in `tau`
/// are kept; positions are renumbered in order and original indices kept.
pub fn restrict(cm: &ChromaticMosaic, tau: &[usize]) -> Result<SimplicialMosaic> {
    let mut tau: Vec<usize> = tau.to_vec();
    tau.sort_unstable();
    tau.dedup();
    if tau.is_empty() {
        return Err(Error::InvalidInput("empty color subset".into()));
    }
    if let Some(&j) = tau.iter().find(|&&j| j > cm.s) {
        return Err(Error::InvalidInput(format!("color {j} exceeds s = {}", cm.s)));
    }
    let mask = color_mask(&tau);
    let t = tau.len() - 1;
    let local = simplex_vertices(t);
    let mut renumber = vec![usize::MAX; cm.colors.len()];
    let mut vertices = Vec::new();
    for (v, &c) in cm.colors.iter().enumerate() {
        if mask & (1 << c) != 0 {
            renumber[v] = vertices.len();
            let slot = tau.binary_search(&c).expect("color in tau");
            let p = &cm.base.vertices[v];
            let mut coords = local[slot].coords.clone();
            coords.extend_from_slice(&p.coords[cm.s..]);
            vertices.push(PointD::new(p.index, coords));
        }
    }
    let top = t + cm.d;
    let cells: Vec<FaceKey> = faces(&cm.base, top)
        .into_iter()
        .filter(|f| cm.signature(f).is_colored(mask))
        .map(|f| {
            FaceKey::new(
                f.refs()
                    .iter()
                    .map(|r| VertexRef { vertex: renumber[r.vertex], shift: r.shift })
                    .collect(),
            )
        })
        .collect();
    let periodic_axes: Vec<usize> = if cm.is_periodic() { (t..t + cm.d).collect() } else { Vec::new() };
    let mut owners: HashMap<FaceKey, Vec<(usize, usize)>> = HashMap::new();
    for (c, cell) in cells.iter().enumerate() {
        for slot in 0..cell.len() {
            owners.entry(cell.facet(slot)).or_default().push((c, slot));
        }
    }
    let mut adjacency: Vec<Vec<Option<usize>>> = cells.iter().map(|c| vec![None; c.len()]).collect();
    for own in owners.values() {
        if let [(a, sa), (b, sb)] = own.as_slice() {
            adjacency[*a][*sa] = Some(*b);
            adjacency[*b][*sb] = Some(*a);
        }
    }
    let mut m = SimplicialMosaic {
        dimension: top,
        vertices,
        cells,
        adjacency,
        circumcenters: Vec::new(),
        flagged: Vec::new(),
        periodic_axes,
    };
    for (c, cell) in m.cells.iter().enumerate() {
        let (center, exact) = delaunay::solve_circumcenter(&m.face_coords(cell))?;
        if exact {
            m.flagged.push(c);
        }
        m.circumcenters.push(PointD::new(c, center));
    }
    Ok(m)
}

/// A face as sorted (original index, shift) pairs.
pub type AbstractFace = Vec<(usize, Shift)>;

/// Every face of the mosaic, keyed by original point indices.
pub fn abstract_complex(m: &SimplicialMosaic) -> Vec<AbstractFace> {
    let mut out: Vec<AbstractFace> = (0..=m.dimension)
        .flat_map(|p| faces(m, p))
        .map(|f| {
            let mut v: AbstractFace = f.refs().iter().map(|r| (m.vertices[r.vertex].index, r.shift)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_unstable();
    out
}

/// Outcome of lifting the Delaunay mosaic of the uncolored set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub checked: usize,
    /// Faces of the uncolored mosaic whose lift is not a chromatic face,
    /// as original point indices.
    pub violations: Vec<Vec<usize>>,
}

/// Checks that every face of the Delaunay mosaic of `points` lifts to a
/// face of the chromatic mosaic.
pub fn lift_check(points: &PointSet, chi: &Coloring) -> Result<LiftReport> {
    let cm = chromatic_delaunay(points, chi)?;
    let plain = if points.periodic {
        let axes: Vec<usize> = (0..points.dim).collect();
        delaunay::delaunay_periodic_axes(points, &axes, &PeriodicOptions::default())?
    } else {
        delaunay::delaunay(points)?
    };
    let mut report = LiftReport::default();
    for p in 0..=points.dim {
        let chromatic: HashSet<FaceKey> = faces(&cm.base, p).into_iter().collect();
        for f in faces(&plain, p) {
            report.checked += 1;
            if !chromatic.contains(&f) {
                report.violations.push(f.refs().iter().map(|r| plain.vertices[r.vertex].index).collect());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::squared_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(n: usize, d: usize, s: usize, seed: u64) -> (PointSet, Coloring) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
        let chi = (0..n).map(|i| if i <= s { i } else { rng.gen_range(0..=s) }).collect();
        (PointSet::from_coords(d, coords, false).unwrap(), Coloring::new(s, chi).unwrap())
    }

    #[test]
    fn simplex_vertices_examples() {
        assert_eq!(simplex_vertices(0)[0].coords, Vec::<f64>::new());
        let u = simplex_vertices(1);
        assert_eq!(u[0].coords, vec![0.0]);
        assert_eq!(u[1].coords, vec![2f64.sqrt()]);
        for s in 2..=6 {
            let u = simplex_vertices(s);
            for i in 0..=s {
                for j in 0..i {
                    assert!((squared_distance(&u[i].coords, &u[j].coords) - 2.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn embed_examples() {
        let ps = PointSet::from_coords(1, vec![vec![0.3], vec![0.7]], false).unwrap();
        let e = embed(&ps, &Coloring::new(1, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(e.points[0].coords, vec![0.0, 0.3]);
        assert!((e.points[1].coords[0] - 1.41421356).abs() < 1e-8);
        assert_eq!(e.points[1].coords[1], 0.7);
        let e0 = embed(&ps, &Coloring::new(0, vec![0, 0]).unwrap()).unwrap();
        assert_eq!(e0.points[1].coords, vec![0.7]);
    }

    #[test]
    fn embedding_adds_two_across_layers() {
        let (ps, chi) = random_instance(12, 2, 2, 3);
        let e = embed(&ps, &chi).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let a = squared_distance(&ps.points[i].coords, &ps.points[j].coords);
                let b = squared_distance(&e.points[i].coords, &e.points[j].coords);
                let extra = if chi.chi[i] == chi.chi[j] { 0.0 } else { 2.0 };
                assert!((b - a - extra).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_point_line() {
        let ps = PointSet::from_coords(1, vec![vec![0.0], vec![1.0]], false).unwrap();
        let chi = Coloring::new(1, vec![0, 1]).unwrap();
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        assert_eq!(cm.base.vertices.len(), 2);
        assert_eq!(cm.base.cells, vec![FaceKey::bounded(&[0, 1])]);
        assert_eq!(cm.signature(&cm.base.cells[0]).counts, vec![1, 1]);
    }

    #[test]
    fn top_cells_are_colorful() {
        for seed in 0..20 {
            let (ps, chi) = random_instance(14, 2, 1, seed);
            let cm = chromatic_delaunay(&ps, &chi).unwrap();
            for cell in &cm.base.cells {
                let sig = cm.signature(cell);
                assert_eq!(sig.total(), 4);
                assert_eq!(sig.support(), 0b11, "seed {seed}: {sig:?}");
            }
        }
    }

    #[test]
    fn faces_partition_by_support() {
        let (ps, chi) = random_instance(15, 2, 2, 7);
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        for p in 0..=cm.base.dimension {
            for (f, sig) in cm.faces_with_signatures(p) {
                assert_eq!(sig.total() as usize, f.dim() + 1);
                let hits = (1u32..8).filter(|&tau| sig.is_colorful(tau)).count();
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn restriction_matches_independent_construction() {
        let (ps, chi) = random_instance(12, 2, 1, 11);
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        for tau in [vec![0], vec![1], vec![0, 1]] {
            let r = restrict(&cm, &tau).unwrap();
            let keep: Vec<usize> = (0..ps.len()).filter(|&i| tau.contains(&chi.chi[i])).collect();
            let sub = ps.subset(&keep);
            let independent = if tau.len() == 1 {
                delaunay::delaunay(&sub).unwrap()
            } else {
                let sub_chi = Coloring::new(1, keep.iter().map(|&i| chi.chi[i]).collect()).unwrap();
                chromatic_delaunay(&sub, &sub_chi).unwrap().base
            };
            assert_eq!(abstract_complex(&r), abstract_complex(&independent), "tau {tau:?}");
        }
        assert!(restrict(&cm, &[]).is_err());
    }

    #[test]
    fn lifting_has_no_violations() {
        let (ps, chi) = random_instance(20, 2, 1, 5);
        let r = lift_check(&ps, &chi).unwrap();
        assert!(r.checked > 0);
        assert!(r.violations.is_empty());
        let (ps, chi) = random_instance(12, 1, 2, 9);
        assert!(lift_check(&ps, &chi).unwrap().violations.is_empty());
        let (ps, _) = random_instance(10, 2, 0, 1);
        let mono = Coloring::new(0, vec![0; 10]).unwrap();
        assert!(lift_check(&ps, &mono).unwrap().violations.is_empty());
    }

    #[test]
    fn periodic_bichromatic_is_a_thickened_torus() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 50;
        let coords = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let ps = PointSet::from_coords(2, coords, true).unwrap();
        let chi = Coloring::new(1, (0..n).map(|i| i % 2).collect()).unwrap();
        let cm = chromatic_delaunay(&ps, &chi).unwrap();
        assert_eq!(cm.base.euler_characteristic(), 0);
        assert!(lift_check(&ps, &chi).unwrap().violations.is_empty());
    }
}
