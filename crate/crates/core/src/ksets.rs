//! Spherical k-sets of small point sets, by exact linear programming.
//!
//! `B` is a spherical k-set of `A` if some sphere has the `k` points of `B`
//! strictly inside and the rest strictly outside. After lifting `x` to
//! `(x, |x|^2)` this is strict linear separation of the lifted sets by a
//! hyperplane with `B` below it; a vertical hyperplane is the halfspace limit.
//!
//! When `A` spans its space, the separating hyperplanes of a given `B` form
//! an open polyhedron whose closure has a vertex: a hyperplane through `d+1`
//! lifted points. With lifted heights perturbed as in [`crate::predicates`],
//! no other point lies on it and the `d+1` points on it can be sent to either
//! side. So the spherical sets are exactly `inside(T) + S` over affinely
//! independent `(d+1)`-subsets `T` and `S` ⊆ `T`. Sets that do not span
//! fall back to an exact linear program with strict inequalities.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{affine_rank, ScaledCoords};
use crate::geometry::{PointSet, Sign};
use crate::lp::feasible_point;
use crate::predicates::{insphere_perturbed_coords, orient_coords};

/// Largest set the oracle accepts.
pub const MAX_POINTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSetReport {
    pub k: usize,
    /// Point indices of each k-set, sorted, in lexicographic order.
    pub subsets: Vec<Vec<usize>>,
    pub count: usize,
    /// Number of k-subsets separable with either side inside the sphere.
    pub symmetric_count: usize,
}

/// Lifted points `(x, |x|^2)` in exact integer coordinates.
struct Lifted {
    rows: Vec<Vec<BigInt>>,
}

impl Lifted {
    fn new(a: &PointSet) -> Self {
        let coords: Vec<&[f64]> = a.points.iter().map(|p| p.coords.as_slice()).collect();
        let mut rows = ScaledCoords::new(&coords).rows;
        for r in rows.iter_mut() {
            let z: BigInt = r.iter().map(|x| x * x).sum();
            r.push(z);
        }
        Lifted { rows }
    }

    /// Exact strict separation with the points flagged in `inside` below
    /// a hyperplane `w . q + b = 0` whose last normal coordinate is `>= 0`.
    fn separable(&self, inside: &[bool]) -> bool {
        let n = self.rows.len();
        if n == 0 || inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
            return true;
        }
        let nv = self.rows[0].len() + 1;
        let mut a = Vec::with_capacity(n + 1);
        let mut c = Vec::with_capacity(n + 1);
        let minus_one = -BigRational::one();
        for (row, &inn) in self.rows.iter().zip(inside) {
            let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.push(BigRational::one());
            if !inn {
                r.iter_mut().for_each(|x| *x = -x.clone());
            }
            a.push(r);
            c.push(minus_one.clone());
        }
        let mut vertical = vec![BigRational::zero(); nv];
        vertical[nv - 2] = minus_one;
        a.push(vertical);
        c.push(BigRational::zero());
        feasible_point(&a, &c).is_some()
    }
}

fn check_size(a: &PointSet) -> Result<()> {
    if a.len() > MAX_POINTS {
        return Err(Error::TooLarge { limit: MAX_POINTS, found: a.len() });
    }
    Ok(())
}

/// Whether the points of `a` at positions `b` can be cut off by a sphere.
pub fn is_separable(b: &[usize], a: &PointSet) -> Result<bool> {
    check_size(a)?;
    let mut mask = 0u32;
    for &i in b {
        if i >= a.len() {
            return Err(Error::InvalidInput(format!("position {i} is not in the set")));
        }
        mask |= 1 << i;
    }
    if mask == 0 || mask.count_ones() as usize == a.len() {
        return Ok(true);
    }
    if !spans(a) {
        let inside: Vec<bool> = (0..a.len()).map(|i| mask & (1 << i) != 0).collect();
        return Ok(Lifted::new(a).separable(&inside));
    }
    let mut found = false;
    for_each_vertex(a, |inside, tight| {
        if !found && inside & !mask == 0 && mask & !(inside | tight) == 0 {
            found = true;
        }
    });
    Ok(found)
}

fn spans(a: &PointSet) -> bool {
    let coords: Vec<&[f64]> = a.points.iter().map(|p| p.coords.as_slice()).collect();
    a.len() > a.dim && affine_rank(&coords) == a.dim
}

/// Calls `f(inside, tight)` for each affinely independent `(d+1)`-subset,
/// with `tight` its position mask and `inside` the mask of the other points
/// strictly inside its perturbed circumsphere.
fn for_each_vertex(a: &PointSet, mut f: impl FnMut(u32, u32)) {
    let n = a.len();
    let m = a.dim + 1;
    let coords: Vec<&[f64]> = a.points.iter().map(|p| p.coords.as_slice()).collect();
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        let simplex: Vec<&[f64]> = pick.iter().map(|&i| coords[i]).collect();
        let o = orient_coords(&simplex);
        if o != Sign::Zero {
            let idx: Vec<usize> = pick.iter().map(|&i| a.points[i].index).collect();
            let tight = pick.iter().fold(0u32, |acc, &i| acc | 1 << i);
            let mut inside = 0u32;
            for q in (0..n).filter(|q| tight & (1 << q) == 0) {
                if insphere_perturbed_coords(&simplex, &idx, o, coords[q], a.points[q].index) == Sign::Positive {
                    inside |= 1 << q;
                }
            }
            f(inside, tight);
        }
        // next combination in lexicographic order
        let Some(i) = (0..m).rev().find(|&i| pick[i] < n - m + i) else { break };
        pick[i] += 1;
        for j in i + 1..m {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Separable subsets of every size up to `kmax` by linear programming, as
/// position bitmasks. Any spherical k-set with `k >= 2` contains a spherical
/// (k-1)-set, so each level is searched among one-point extensions of the
/// previous one.
fn levels(lifted: &Lifted, n: usize, kmax: usize) -> Vec<BTreeSet<u32>> {
    let mut out = vec![BTreeSet::from([0u32])];
    for _ in 1..=kmax {
        let prev = out.last().expect("level");
        let candidates: BTreeSet<u32> = prev
            .iter()
            .flat_map(|&m| (0..n).filter(move |i| m & (1 << i) == 0).map(move |i| m | (1 << i)))
            .collect();
        let cand: Vec<u32> = candidates.into_iter().collect();
        let found: Vec<u32> = cand
            .par_iter()
            .copied()
            .filter(|&m| {
                let inside: Vec<bool> = (0..n).map(|i| m & (1 << i) != 0).collect();
                lifted.separable(&inside)
            })
            .collect();
        out.push(found.into_iter().collect());
    }
    out
}

/// All spherical k-sets of `a`.
pub fn spherical_ksets(a: &PointSet, k: usize) -> Result<KSetReport> {
    check_size(a)?;
    if k == 0 || k > a.len() {
        return Err(Error::InvalidInput(format!("k must lie in 1..={}", a.len())));
    }
    Ok(all_spherical_ksets(a)?.swap_remove(k - 1))
}

/// Reports for every `k` in `1..=n`.
pub fn all_spherical_ksets(a: &PointSet) -> Result<Vec<KSetReport>> {
    check_size(a)?;
    let n = a.len();
    let lv: Vec<BTreeSet<u32>> = if spans(a) {
        let mut lv = vec![BTreeSet::new(); n + 1];
        lv[0].insert(0);
        for_each_vertex(a, |inside, tight| {
            let mut sub = tight;
            loop {
                let b = inside | sub;
                lv[b.count_ones() as usize].insert(b);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & tight;
            }
        });
        lv
    } else {
        levels(&Lifted::new(a), n, n)
    };
    let full = (1u32 << n) - 1;
    Ok((1..=n)
        .map(|k| {
            let mut subsets: Vec<Vec<usize>> = lv[k]
                .iter()
                .map(|&m| {
                    let mut v: Vec<usize> = (0..n).filter(|i| m & (1 << i) != 0).map(|i| a.points[i].index).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            subsets.sort();
            let outside_only = lv[n - k].iter().filter(|&&m| !lv[k].contains(&(full & !m))).count();
            KSetReport { k, count: subsets.len(), symmetric_count: subsets.len() + outside_only, subsets }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(coords: &[&[f64]]) -> PointSet {
        let dim = coords[0].len();
        PointSet::from_coords(dim, coords.iter().map(|c| c.to_vec()).collect(), false).unwrap()
    }

    fn random(n: usize, d: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
        PointSet::from_coords(d, coords, false).unwrap()
    }

    #[test]
    fn separability_examples() {
        let a = set(&[&[0.0, 0.0], &[0.1, 0.0], &[5.0, 5.0], &[5.0, -5.0], &[-5.0, 0.0]]);
        assert!(is_separable(&[0, 1], &a).unwrap());
        assert!(is_separable(&[0, 1, 2, 3, 4], &a).unwrap());
        let line = set(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]]);
        assert!(!is_separable(&[0, 2], &line).unwrap());
        assert!(is_separable(&[1, 2], &line).unwrap());
    }

    #[test]
    fn collinear_pairs_by_exhaustion() {
        let line = set(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]]);
        let mut pairs = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                if is_separable(&[i, j], &line).unwrap() {
                    pairs.push(vec![i, j]);
                }
            }
        }
        let r = spherical_ksets(&line, 2).unwrap();
        assert_eq!(r.subsets, pairs);
        assert_eq!(r.subsets, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert_eq!(r.count, 3);
    }

    #[test]
    fn cocircular_ties_are_broken_once() {
        let square = set(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let r = spherical_ksets(&square, 2).unwrap();
        // four sides plus exactly one of the two diagonals
        assert_eq!(r.count, 5);
        let diagonals = r.subsets.iter().filter(|b| *b == &vec![0, 2] || *b == &vec![1, 3]).count();
        assert_eq!(diagonals, 1);
    }

    #[test]
    fn small_counts() {
        let tri = set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.3, 0.8]]);
        assert_eq!(spherical_ksets(&tri, 1).unwrap().count, 3);
        assert_eq!(spherical_ksets(&tri, 3).unwrap().count, 1);
        assert!(spherical_ksets(&tri, 0).is_err());
        assert!(spherical_ksets(&tri, 4).is_err());
    }

    #[test]
    fn enumeration_matches_linear_programming() {
        for seed in 0..3 {
            let a = random(6, 2, seed);
            let reports = all_spherical_ksets(&a).unwrap();
            for r in &reports {
                let mut brute = Vec::new();
                for m in 0u32..(1 << 6) {
                    if m.count_ones() as usize != r.k {
                        continue;
                    }
                    let b: Vec<usize> = (0..6).filter(|i| m & (1 << i) != 0).collect();
                    let inside: Vec<bool> = (0..6).map(|i| m & (1 << i) != 0).collect();
                    if Lifted::new(&a).separable(&inside) {
                        brute.push(b.clone());
                    }
                    assert_eq!(is_separable(&b, &a).unwrap(), Lifted::new(&a).separable(&inside));
                }
                brute.sort();
                assert_eq!(r.subsets, brute, "seed {seed} k {}", r.k);
            }
        }
    }

    #[test]
    fn nearest_neighbors_of_a_probe_are_separable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5 {
            let a = random(10, 2, 100 + seed);
            let reports = all_spherical_ksets(&a).unwrap();
            for _ in 0..20 {
                let x = [rng.gen::<f64>() * 2.0 - 0.5, rng.gen::<f64>() * 2.0 - 0.5];
                let mut order: Vec<usize> = (0..10).collect();
                let dist = |i: usize| {
                    let p = &a.points[i].coords;
                    (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)
                };
                order.sort_by(|&i, &j| dist(i).total_cmp(&dist(j)));
                for k in 1..=10 {
                    let mut b = order[..k].to_vec();
                    b.sort_unstable();
                    assert!(reports[k - 1].subsets.contains(&b));
                }
            }
        }
    }

    #[test]
    fn symmetric_count_includes_complements() {
        let a = random(7, 2, 42);
        let reports = all_spherical_ksets(&a).unwrap();
        for r in &reports {
            assert!(r.symmetric_count >= r.count);
            let n = 7;
            let mut union: BTreeSet<Vec<usize>> = r.subsets.iter().cloned().collect();
            if r.k < n {
                for s in &reports[n - r.k - 1].subsets {
                    union.insert((0..n).filter(|i| !s.contains(i)).collect());
                }
            }
            assert_eq!(union.len(), r.symmetric_count);
        }
    }

    #[test]
    fn lee_bound_on_random_planar_sets() {
        for seed in 0..10 {
            let n = 6 + (seed as usize % 7);
            let a = random(n, 2, 500 + seed);
            for r in all_spherical_ksets(&a).unwrap() {
                assert!(r.count < 2 * r.k * n, "n {n} k {} count {}", r.k, r.count);
            }
        }
    }

    #[test]
    fn oversize_input_is_rejected() {
        let a = random(17, 2, 1);
        assert!(matches!(is_separable(&[0], &a), Err(Error::TooLarge { .. })));
    }
}
