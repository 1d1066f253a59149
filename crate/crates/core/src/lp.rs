//! Exact feasibility of small systems of linear inequalities, by the
//! two-phase simplex method over rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Finds some `x` with `a x <= c`, with all variables free, or `None` when
/// the system is infeasible.
pub(crate) fn feasible_point(a: &[Vec<BigRational>], c: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let nv = a.first().map_or(0, Vec::len);
    // columns: x+ (nv), x- (nv), slack (m), artificial (one per negated row)
    let negated: Vec<bool> = c.iter().map(|ci| ci.is_negative()).collect();
    let n_art = negated.iter().filter(|&&b| b).count();
    let cols = 2 * nv + m + n_art;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 2 * nv + m;
    for i in 0..m {
        let sgn = if negated[i] { -BigRational::one() } else { BigRational::one() };
        let mut row = vec![BigRational::zero(); cols + 1];
        for j in 0..nv {
            row[j] = &a[i][j] * &sgn;
            row[nv + j] = -&row[j];
        }
        row[2 * nv + i] = sgn.clone();
        row[cols] = &c[i] * &sgn;
        if negated[i] {
            row[art] = BigRational::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(2 * nv + i);
        }
        tab.push(row);
    }
    // reduced costs of the phase-one objective (sum of artificials)
    let mut obj = vec![BigRational::zero(); cols + 1];
    for (i, row) in tab.iter().enumerate() {
        if negated[i] {
            for j in 0..=cols {
                if j < 2 * nv + m || j == cols {
                    obj[j] -= &row[j];
                }
            }
        }
    }
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[cols] / &row[enter];
            let better = match &leave {
                None => true,
                Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // phase one is bounded below by zero
        let (r, _) = leave.expect("bounded phase-one objective");
        pivot(&mut tab, &mut obj, r, enter);
        basis[r] = enter;
    }
    if !obj[cols].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); nv];
    for (i, &b) in basis.iter().enumerate() {
        if b < nv {
            x[b] += &tab[i][cols];
        } else if b < 2 * nv {
            x[b - nv] -= &tab[i][cols];
        }
    }
    Some(x)
}

fn pivot(tab: &mut [Vec<BigRational>], obj: &mut [BigRational], r: usize, col: usize) {
    let p = tab[r][col].clone();
    for v in tab[r].iter_mut() {
        *v /= &p;
    }
    let prow = tab[r].clone();
    let eliminate = |row: &mut [BigRational]| {
        let f = row[col].clone();
        if f.is_zero() {
            return;
        }
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(obj);
}
