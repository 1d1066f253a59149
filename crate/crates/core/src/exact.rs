//! Exact determinant signs for matrices whose entries are built from `f64`
//! inputs. Every finite double is a dyadic rational, so a common power-of-two
//! scale turns all coordinates into integers and fraction-free (Bareiss)
//! elimination gives the exact sign.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, Zero};

use crate::geometry::Sign;

/// Coordinates rescaled to integers by a shared power of two.
pub(crate) struct ScaledCoords {
    pub rows: Vec<Vec<BigInt>>,
}

impl ScaledCoords {
    pub fn new(points: &[&[f64]]) -> Self {
        let decoded: Vec<Vec<(u64, i16, i8)>> = points
            .iter()
            .map(|p| p.iter().map(|x| x.integer_decode()).collect())
            .collect();
        let min_exp = decoded
            .iter()
            .flatten()
            .filter(|(m, _, _)| *m != 0)
            .map(|(_, e, _)| *e)
            .min()
            .unwrap_or(0);
        let rows = decoded
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(m, e, s)| {
                        if m == 0 {
                            return BigInt::zero();
                        }
                        let v = BigInt::from(m) << ((e - min_exp) as usize);
                        if s < 0 {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        ScaledCoords { rows }
    }
}

/// Sign of the determinant of a square integer matrix (Bareiss elimination).
pub fn det_sign_int(mut m: Vec<Vec<BigInt>>) -> Sign {
    let n = m.len();
    if n == 0 {
        return Sign::Positive;
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Sign::Zero,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let last = &m[n - 1][n - 1];
    if last.is_zero() {
        Sign::Zero
    } else if last.is_positive() {
        Sign::from_i32(sign)
    } else {
        Sign::from_i32(-sign)
    }
}

/// Sign of the determinant of a rational matrix by Gaussian elimination.
/// Kept independent of the integer path so the two can cross-check.
pub fn det_sign_rational(mut m: Vec<Vec<BigRational>>) -> Sign {
    let n = m.len();
    let mut sign = 1i32;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Sign::Zero;
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        if m[k][k].is_negative() {
            sign = -sign;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let v = &f * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    Sign::from_i32(sign)
}

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}


/// Exact rank of the difference vectors `p_i - p_0`.
pub(crate) fn affine_rank(points: &[&[f64]]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let s = ScaledCoords::new(points);
    let base = &s.rows[0];
    let mut m: Vec<Vec<BigInt>> = s.rows[1..]
        .iter()
        .map(|r| r.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let cols = base.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            for j in c + 1..cols {
                let v = &m[r][j] * &m[rank][c] - &m[rank][j] * &m[r][c];
                m[r][j] = v;
            }
            m[r][c] = BigInt::zero();
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
