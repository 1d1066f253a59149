//! Orientation and in-sphere predicates in any dimension.
//!
//! Evaluation is two-stage: a floating-point determinant (Laplace expansion)
//! whose forward error is bounded by a multiple of the permanent of the
//! absolute entries, and an exact integer fallback when the float value does
//! not clear that bound.
//!
//! Degenerate in-sphere cases are resolved by symbolically raising the lifted
//! height of every point by `eps^(rank of its index)`: the smallest index gets
//! the most significant perturbation. The lifted determinant is linear in the
//! height column, so its perturbed sign is the first nonzero term in
//! `R, C_{i_0}, C_{i_1}, ...` where `C_r` are orientation cofactors taken in
//! increasing index order. The cofactor that drops the query is the simplex
//! orientation itself, so the expansion always terminates.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{self, ScaledCoords};
use crate::geometry::{PointD, Sign};

const MAX_N: usize = 8;
const UNIT_ROUNDOFF: f64 = 1.1102230246251565e-16; // 2^-53

type Matrix = [[f64; MAX_N]; MAX_N];

/// Float determinant with a certified sign, or `None` when the magnitude is
/// inside the error bound. `entry_ops` bounds the roundings that went into
/// each entry.
fn det_filtered(m: &Matrix, n: usize, entry_ops: usize) -> Option<Sign> {
    debug_assert!(n <= MAX_N);
    let size = 1usize << n;
    let mut det = [0.0f64; 1 << MAX_N];
    let mut perm = [0.0f64; 1 << MAX_N];
    det[0] = 1.0;
    perm[0] = 1.0;
    for mask in 1..size {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let (mut d, mut p) = (0.0, 0.0);
        let mut pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let a = m[row][j];
            let sub = mask ^ (1 << j);
            let term = a * det[sub];
            if pos % 2 == 0 {
                d += term;
            } else {
                d -= term;
            }
            p += a.abs() * perm[sub];
            pos += 1;
        }
        det[mask] = d;
        perm[mask] = p;
    }
    let value = det[size - 1];
    let magnitude = perm[size - 1];
    if !magnitude.is_finite() || !value.is_finite() || magnitude < 1e-250 {
        return None;
    }
    let k = (n * n + n * entry_ops) as f64;
    let bound = 2.0 * k * UNIT_ROUNDOFF * magnitude;
    if value.abs() > bound {
        Some(Sign::of(value))
    } else {
        None
    }
}

fn orient_exact(pts: &[&[f64]]) -> Sign {
    let s = ScaledCoords::new(pts);
    let base = &s.rows[0];
    let m: Vec<Vec<BigInt>> = s.rows[1..]
        .iter()
        .map(|r| r.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    exact::det_sign_int(m)
}

/// Orientation of `d+1` points in `R^d`: the sign of the determinant of the
/// edge vectors `p_j - p_0`. No validation.
pub(crate) fn orient_coords(pts: &[&[f64]]) -> Sign {
    let d = pts.len() - 1;
    if d == 0 {
        return Sign::Positive;
    }
    if d <= MAX_N {
        let mut m = [[0.0; MAX_N]; MAX_N];
        let mut used_cols = 0u32;
        for j in 1..=d {
            let mut used_row = false;
            for k in 0..d {
                let v = pts[j][k] - pts[0][k];
                m[j - 1][k] = v;
                if v != 0.0 {
                    used_cols |= 1 << k;
                    used_row = true;
                }
            }
            if !used_row {
                return Sign::Zero;
            }
        }
        // float differences vanish exactly iff the coordinates agree
        if used_cols != (1u32 << d) - 1 {
            return Sign::Zero;
        }
        if let Some(s) = det_filtered(&m, d, 1) {
            return s;
        }
    }
    orient_exact(pts)
}

fn insphere_exact(simplex: &[&[f64]], q: &[f64]) -> Sign {
    let mut all: Vec<&[f64]> = simplex.to_vec();
    all.push(q);
    let s = ScaledCoords::new(&all);
    let qrow = &s.rows[simplex.len()];
    let m: Vec<Vec<BigInt>> = s.rows[..simplex.len()]
        .iter()
        .map(|r| {
            let mut row: Vec<BigInt> = r.iter().zip(qrow).map(|(a, b)| a - b).collect();
            let lifted: BigInt = row.iter().map(|v| v * v).sum();
            row.push(lifted);
            row
        })
        .collect();
    exact::det_sign_int(m)
}

/// Sign of `det[p_i - q, |p_i - q|^2]`, the lifted determinant. Flips with
/// the parity of the simplex vertex order.
pub(crate) fn lifted_det_coords(simplex: &[&[f64]], q: &[f64]) -> Sign {
    let d = simplex.len() - 1;
    let n = d + 1;
    if n <= MAX_N {
        let mut m = [[0.0; MAX_N]; MAX_N];
        for (i, p) in simplex.iter().enumerate() {
            let mut norm = 0.0;
            for k in 0..d {
                let v = p[k] - q[k];
                m[i][k] = v;
                norm += v * v;
            }
            m[i][d] = norm;
        }
        if let Some(s) = det_filtered(&m, n, 3 * d + 2) {
            return s;
        }
    }
    insphere_exact(simplex, q)
}

/// Lifted determinant under the index-keyed height perturbation; never Zero
/// for a non-degenerate simplex.
pub(crate) fn lifted_det_perturbed_coords(
    simplex: &[&[f64]],
    simplex_idx: &[usize],
    q: &[f64],
    q_idx: usize,
) -> Sign {
    let raw = lifted_det_coords(simplex, q);
    if raw != Sign::Zero {
        return raw;
    }
    let total = simplex.len() + 1;
    let mut rows: Vec<usize> = (0..total).collect();
    let key = |r: usize| if r < simplex.len() { simplex_idx[r] } else { q_idx };
    rows.sort_by_key(|&r| key(r));
    let mut others: Vec<&[f64]> = Vec::with_capacity(simplex.len());
    for r in rows {
        others.clear();
        for t in 0..total {
            if t != r {
                others.push(if t < simplex.len() { simplex[t] } else { q });
            }
        }
        let cofactor = orient_coords(&others);
        if cofactor != Sign::Zero {
            return if r % 2 == 0 { cofactor } else { -cofactor };
        }
    }
    unreachable!("the simplex orientation cofactor is nonzero for non-degenerate simplices")
}

fn parity_sign(d: usize) -> Sign {
    if d % 2 == 0 {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Orientation-compensated in-sphere sign: Positive iff `q` lies strictly
/// inside the circumsphere. `simplex_orientation` must be nonzero.
pub(crate) fn insphere_coords(simplex: &[&[f64]], simplex_orientation: Sign, q: &[f64]) -> Sign {
    let d = simplex.len() - 1;
    lifted_det_coords(simplex, q) * simplex_orientation * parity_sign(d)
}

/// Perturbed, orientation-compensated in-sphere sign. Never Zero.
pub(crate) fn insphere_perturbed_coords(
    simplex: &[&[f64]],
    simplex_idx: &[usize],
    simplex_orientation: Sign,
    q: &[f64],
    q_idx: usize,
) -> Sign {
    let d = simplex.len() - 1;
    lifted_det_perturbed_coords(simplex, simplex_idx, q, q_idx) * simplex_orientation * parity_sign(d)
}

fn check_simplex(simplex: &[PointD]) -> Result<usize> {
    let Some(first) = simplex.first() else {
        return Err(Error::InvalidInput("empty simplex".into()));
    };
    let d = first.dim();
    if simplex.len() != d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, found: simplex.len() });
    }
    if let Some(p) = simplex.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
    }
    Ok(d)
}

fn coords(simplex: &[PointD]) -> Vec<&[f64]> {
    simplex.iter().map(|p| p.coords.as_slice()).collect()
}

/// Orientation of `d+1` points in `R^d`; Positive for the identity basis.
pub fn orientation(simplex: &[PointD]) -> Result<Sign> {
    check_simplex(simplex)?;
    Ok(orient_coords(&coords(simplex)))
}

fn check_query(simplex: &[PointD], query: &PointD) -> Result<Sign> {
    let d = check_simplex(simplex)?;
    if query.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: query.dim() });
    }
    let o = orient_coords(&coords(simplex));
    if o == Sign::Zero {
        return Err(Error::DegenerateSimplex);
    }
    Ok(o)
}

/// Positive iff `query` is strictly inside the circumsphere of `simplex`,
/// Zero on the sphere, independent of vertex order.
pub fn insphere(simplex: &[PointD], query: &PointD) -> Result<Sign> {
    let o = check_query(simplex, query)?;
    Ok(insphere_coords(&coords(simplex), o, &query.coords))
}

fn check_indices(simplex: &[PointD], query: &PointD) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = simplex.iter().map(|p| p.index).collect();
    idx.push(query.index);
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("predicate points must have distinct indices".into()));
    }
    idx.pop();
    Ok(idx)
}

/// [`insphere`] with degeneracies broken by the index-keyed perturbation.
pub fn insphere_perturbed(simplex: &[PointD], query: &PointD) -> Result<Sign> {
    let o = check_query(simplex, query)?;
    let idx = check_indices(simplex, query)?;
    Ok(insphere_perturbed_coords(&coords(simplex), &idx, o, &query.coords, query.index))
}

/// The raw perturbed lifted determinant, before orientation compensation.
/// Swapping two simplex vertices flips it.
pub fn lifted_determinant_perturbed(simplex: &[PointD], query: &PointD) -> Result<Sign> {
    check_query(simplex, query)?;
    let idx = check_indices(simplex, query)?;
    Ok(lifted_det_perturbed_coords(&coords(simplex), &idx, &query.coords, query.index))
}

/// Arbitrary-precision versions of the predicates over rational
/// coordinates. Slow; used to cross-check the filtered path.
pub mod rational {
    use super::*;

    pub fn orientation(pts: &[Vec<BigRational>]) -> Sign {
        let m = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
            .collect();
        exact::det_sign_rational(m)
    }

    pub fn insphere(simplex: &[Vec<BigRational>], q: &[BigRational]) -> Sign {
        let d = simplex.len() - 1;
        let m = simplex
            .iter()
            .map(|p| {
                let mut row: Vec<BigRational> = p.iter().zip(q).map(|(a, b)| a - b).collect();
                let norm = row.iter().fold(BigRational::from_integer(0.into()), |acc, v| acc + v * v);
                row.push(norm);
                row
            })
            .collect();
        exact::det_sign_rational(m) * orientation(simplex) * parity_sign(d)
    }

    pub fn from_point(p: &PointD) -> Vec<BigRational> {
        p.coords.iter().map(|&x| exact::rational(x)).collect()
    }
}
