#![allow(dead_code)]

use chromosaic::chromatic::Coloring;
use chromosaic::sampling::{random_coloring, stream, uniform};
use chromosaic::PointSet;

/// Bits of the integer grid used by [`grid_instance`].
pub const GRID_BITS: u32 = 16;

/// Random points on the grid `2^-16 Z^d` in the unit cube, together with
/// their integer coordinates.
pub fn grid_instance(n: usize, d: usize, seed: u64) -> (PointSet, Vec<Vec<i64>>) {
    let mut rng = stream(seed, 0);
    let side = 1u64 << GRID_BITS;
    let ints: Vec<Vec<i64>> =
        (0..n).map(|_| (0..d).map(|_| (uniform(&mut rng) * side as f64) as i64).collect()).collect();
    let coords = ints.iter().map(|p| p.iter().map(|&x| x as f64 / side as f64).collect()).collect();
    (PointSet::from_coords(d, coords, false).unwrap(), ints)
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        k => (0..k)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let t = m[0][j] * det(&minor);
                if j % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum(),
    }
}

/// Delaunay cells of integer points in general position by testing every
/// `(d+1)`-subset for an empty circumsphere, in exact integer arithmetic.
/// Returns `None` when the input is degenerate: a flat subset, or a point
/// on a circumsphere.
pub fn brute_force_delaunay(ints: &[Vec<i64>]) -> Option<Vec<Vec<usize>>> {
    let n = ints.len();
    let d = ints.first()?.len();
    assert!(d <= 4 && GRID_BITS <= 16, "exceeds the i128 bound");
    let lifted: Vec<Vec<i128>> = ints
        .iter()
        .map(|p| {
            let mut q: Vec<i128> = p.iter().map(|&x| x as i128).collect();
            q.push(p.iter().map(|&x| (x as i128) * (x as i128)).sum());
            q
        })
        .collect();
    let sub = |a: &[i128], b: &[i128]| -> Vec<i128> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let mut cells = Vec::new();
    let mut pick: Vec<usize> = (0..=d).collect();
    loop {
        let base = &lifted[pick[0]];
        let w: Vec<Vec<i128>> = pick[1..].iter().map(|&i| sub(&lifted[i], base)).collect();
        // normal of the hyperplane through the lifted simplex
        let normal: Vec<i128> = (0..=d)
            .map(|k| {
                let minor: Vec<Vec<i128>> =
                    w.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != k).map(|(_, &x)| x).collect()).collect();
                if k % 2 == 0 {
                    det(&minor)
                } else {
                    -det(&minor)
                }
            })
            .collect();
        let up = normal[d].signum();
        if up == 0 {
            return None;
        }
        let mut empty = true;
        for (i, q) in lifted.iter().enumerate() {
            if pick.contains(&i) {
                continue;
            }
            let side: i128 = normal.iter().zip(sub(q, base)).map(|(a, b)| a * b).sum();
            match side.signum() * up {
                0 => return None,
                -1 => {
                    empty = false;
                    break;
                }
                _ => {}
            }
        }
        if empty {
            cells.push(pick.clone());
        }
        let k = d + 1;
        let Some(i) = (0..k).rev().find(|&i| pick[i] < n - k + i) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
    Some(cells)
}

/// Uniform points, bounded or on the torus, whose first `(d + 2)(s + 1)`
/// points cycle through the colors so every class can span.
pub fn colored_instance(n: usize, d: usize, s: usize, periodic: bool, seed: u64) -> (PointSet, Coloring) {
    let mut rng = stream(seed, 0);
    let coords = (0..n).map(|_| (0..d).map(|_| uniform(&mut rng)).collect()).collect();
    let points = PointSet::from_coords(d, coords, periodic).unwrap();
    let mut chi = random_coloring(n, s, seed, None).unwrap().chi;
    for (k, c) in chi.iter_mut().take((d + 2) * (s + 1)).enumerate() {
        *c = k % (s + 1);
    }
    (points, Coloring::new(s, chi).unwrap())
}
