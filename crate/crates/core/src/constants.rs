//! Density constants for crossings of Voronoi tessellations of Poisson
//! processes, and the predictions built from them.
//!
//! `V(p, d)` scales the density of the p-dimensional volume of the
//! p-skeleton, `D(p, d)` the density of crossings between a p-plane and the
//! (d-p)-cells, and `X(d)` is half the sum of their products.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crate::census::{mp_np, CountTable, DensityReport};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        // shift up to keep the series in its accurate range
        return ln_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// The gamma function for `x > 0`. Integers are exact factorials.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    ln_gamma(x).exp()
}

/// `(d-1)`-dimensional volume of the unit sphere in `R^d`.
pub fn omega(d: usize) -> f64 {
    assert!(d >= 1, "omega needs d >= 1");
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

fn check_pd(p: usize, d: usize) -> Result<()> {
    if d < 2 || p < 1 || p >= d {
        return Err(Error::InvalidInput(format!("need d >= 2 and 1 <= p <= d-1, got p={p}, d={d}")));
    }
    Ok(())
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Skeleton-volume constant `V(p, d)`.
pub fn v_const(p: usize, d: usize) -> Result<f64> {
    check_pd(p, d)?;
    let (pf, df) = (p as f64, d as f64);
    let q = df - pf;
    let ln = (q + 1.0) * 2f64.ln() + q / 2.0 * PI.ln() - df.ln() - ln_factorial(d - p + 1)
        + ln_gamma((df * df - pf * df + pf + 1.0) / 2.0)
        - ln_gamma((df * df - pf * df + pf) / 2.0)
        + (q + pf / df) * ln_gamma((df + 2.0) / 2.0)
        - q * ln_gamma((df + 1.0) / 2.0)
        + ln_gamma(q + pf / df)
        - ln_gamma((pf + 1.0) / 2.0);
    Ok(ln.exp())
}

/// Plane-crossing constant `D(p, d)`.
pub fn d_const(p: usize, d: usize) -> Result<f64> {
    check_pd(p, d)?;
    let (pf, df) = (p as f64, d as f64);
    let spheres = omega(1) * omega(d + 1) / (omega(p + 1) * omega(d - p + 1));
    let ln = (pf + 1.0) * 2f64.ln() + pf / 2.0 * PI.ln() - df.ln() - ln_factorial(p + 1)
        + ln_gamma((pf * df + df - pf + 1.0) / 2.0)
        - ln_gamma((pf * df + df - pf) / 2.0)
        + (pf + 1.0 - pf / df) * ln_gamma((df + 2.0) / 2.0)
        - pf * ln_gamma((df + 1.0) / 2.0)
        + ln_gamma(pf + 1.0 - pf / df)
        - ln_gamma((df - pf + 1.0) / 2.0);
    Ok(spheres * ln.exp())
}

/// Crossing constant `X(d) = (1/2) sum_p V(p, d) D(p, d)`.
pub fn x_const(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("need d >= 2, got {d}")));
    }
    let mut sum = 0.0;
    for p in 1..d {
        sum += v_const(p, d)? * d_const(p, d)?;
    }
    Ok(sum / 2.0)
}

/// One row of the constants table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub d: usize,
    pub p: usize,
    pub v: f64,
    pub d_value: f64,
    pub product: f64,
    pub x: f64,
}

/// Rows for `2 <= d <= dmax` and `1 <= p <= d-1`.
pub fn constants_table(dmax: usize) -> Result<Vec<ConstantsRow>> {
    let mut rows = Vec::new();
    for d in 2..=dmax {
        let x = x_const(d)?;
        for p in 1..d {
            let v = v_const(p, d)?;
            let dv = d_const(p, d)?;
            rows.push(ConstantsRow { d, p, v, d_value: dv, product: v * dv, x });
        }
    }
    Ok(rows)
}

/// Models with a closed-form crossing density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CrossingModel {
    /// Uniform random coloring with `s + 1` colors in the plane.
    Plane { s: usize, rho: f64 },
    /// Uniform random bi-coloring in `R^d`.
    TwoColor { d: usize, rho: f64 },
    /// Bi-coloring in the plane with color 0 drawn with probability `lambda`.
    BiasedPlane { lambda: f64, rho: f64 },
}

/// Expected number of crossings per unit volume.
pub fn predicted_crossing_density(model: CrossingModel) -> Result<f64> {
    match model {
        CrossingModel::Plane { s, rho } => Ok(4.0 * s as f64 / PI * rho),
        CrossingModel::TwoColor { d, rho } => Ok(x_const(d)? * rho),
        CrossingModel::BiasedPlane { lambda, rho } => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidInput(format!("lambda {lambda} outside [0, 1]")));
            }
            Ok(8.0 / PI * (lambda * (1.0 - lambda)).sqrt() * rho)
        }
    }
}

/// Prediction for a uniform coloring with `s + 1` colors in `R^d`, when one
/// is known.
pub fn predicted_for(d: usize, s: usize, rho: f64) -> Result<f64> {
    match (d, s) {
        (_, 0) => Ok(0.0),
        (2, s) => predicted_crossing_density(CrossingModel::Plane { s, rho }),
        (d, 1) if d >= 2 => predicted_crossing_density(CrossingModel::TwoColor { d, rho }),
        (1, _) => Err(Error::Unsupported("crossings on the line are not defined".into())),
        (d, s) => Err(Error::Unsupported(format!("no known crossing density for d={d} with {} colors", s + 1))),
    }
}
