//! Seeded random inputs: Poisson processes on the torus, random colorings,
//! perturbed lattices and points on the moment curve.
//!
//! All randomness comes from ChaCha8 streams: [`stream`]`(seed, id)` seeds
//! ChaCha8 with the 64-bit `seed` and selects stream `id`, so streams are
//! independent and reproducible in any order. Uniform doubles take the top
//! 53 bits of a 64-bit output divided by 2^53. Trial `t` of an experiment
//! draws its points from stream `2t` and its colors from stream `2t + 1`.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chromatic::Coloring;
use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Independent generator number `id` for `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform double in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn ln_factorial(k: u64) -> f64 {
    crate::constants::ln_gamma(k as f64 + 1.0)
}

/// Poisson variate with mean `mu`: inversion for `mu <= 1000`, otherwise
/// transformed rejection (PTRS).
pub fn poisson(mu: f64, rng: &mut impl RngCore) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    if mu <= 1000.0 {
        // inversion, searching outwards from the mode
        let mode = mu.floor();
        let p_mode = (mode * mu.ln() - mu - ln_factorial(mode as u64)).exp();
        let mut cdf = p_mode;
        let (mut p, mut k) = (p_mode, mode);
        while k > 0.0 && p > 1e-300 {
            p *= k / mu;
            k -= 1.0;
            cdf += p;
        }
        let u = uniform(rng);
        let (mut p, mut k) = (p_mode, mode);
        if u < cdf {
            loop {
                cdf -= p;
                if u >= cdf || k == 0.0 {
                    return k as u64;
                }
                p *= k / mu;
                k -= 1.0;
            }
        }
        loop {
            k += 1.0;
            p *= mu / k;
            cdf += p;
            if u < cdf || p == 0.0 {
                return k as u64;
            }
        }
    }
    let slam = mu.sqrt();
    let loglam = mu.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mu + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if (v * inv_alpha / (a / (us * us) + b)).ln() <= -mu + k * loglam - ln_factorial(k as u64) {
            return k as u64;
        }
    }
}

/// A Poisson number of uniform points in `[0,1)^d` with mean `rho`,
/// read on the torus.
pub fn poisson_torus(rho: f64, d: usize, seed: u64) -> Result<PointSet> {
    poisson_torus_stream(rho, d, &mut stream(seed, 0))
}

pub(crate) fn poisson_torus_stream(rho: f64, d: usize, rng: &mut impl RngCore) -> Result<PointSet> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("intensity must be positive, got {rho}")));
    }
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let n = poisson(rho, rng);
    let coords = (0..n).map(|_| (0..d).map(|_| uniform(rng)).collect()).collect();
    PointSet::from_coords(d, coords, true)
}

/// Independent colors in `0..=s`, uniform or drawn with the given weights.
pub fn random_coloring(n: usize, s: usize, seed: u64, weights: Option<&[f64]>) -> Result<Coloring> {
    random_coloring_stream(n, s, weights, &mut stream(seed, 1))
}

pub(crate) fn random_coloring_stream(
    n: usize,
    s: usize,
    weights: Option<&[f64]>,
    rng: &mut impl RngCore,
) -> Result<Coloring> {
    let cumulative = match weights {
        None => (1..=s + 1).map(|j| j as f64 / (s + 1) as f64).collect::<Vec<_>>(),
        Some(w) => {
            if w.len() != s + 1 || w.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidInput(format!("need {} nonnegative weights", s + 1)));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
            }
            w.iter()
                .scan(0.0, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect()
        }
    };
    let positive: Vec<usize> = (0..=s).filter(|&j| weights.map_or(true, |w| w[j] > 0.0)).collect();
    let last = *positive.last().expect("some color has positive weight");
    let chi = (0..n)
        .map(|_| {
            let u = uniform(rng);
            positive.iter().copied().find(|&j| u < cumulative[j]).unwrap_or(last)
        })
        .collect();
    Coloring::new(s, chi)
}

/// Ratio of the largest to the smallest distance between two points.
pub fn density(points: &PointSet) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: points.len() });
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0f64;
    for (i, p) in points.points.iter().enumerate() {
        for q in &points.points[i + 1..] {
            let d2 = p.squared_distance(q);
            lo = lo.min(d2);
            hi = hi.max(d2);
        }
    }
    if lo == 0.0 {
        return Err(Error::InvalidInput("coincident points have infinite density".into()));
    }
    Ok((hi / lo).sqrt())
}

/// A lattice with unit spacing and `ceil(n^(1/d))` points per side, each
/// point moved uniformly within `[-jitter, jitter]^d`, with its density.
pub fn perturbed_grid(n: usize, jitter: f64, d: usize, seed: u64) -> Result<(PointSet, f64)> {
    if !(0.0..0.5).contains(&jitter) {
        return Err(Error::InvalidInput(format!("jitter {jitter} must lie in [0, 0.5)")));
    }
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput("need d >= 1 and n >= 1".into()));
    }
    let mut side = (n as f64).powf(1.0 / d as f64).round() as usize;
    while side.pow(d as u32) < n {
        side += 1;
    }
    let mut rng = stream(seed, 0);
    let total = side.pow(d as u32);
    let coords: Vec<Vec<f64>> = (0..total)
        .map(|i| {
            let mut rest = i;
            (0..d)
                .map(|_| {
                    let c = (rest % side) as f64;
                    rest /= side;
                    c + jitter * (2.0 * uniform(&mut rng) - 1.0)
                })
                .collect()
        })
        .collect();
    let points = PointSet::from_coords(d, coords, false)?;
    let m = density(&points)?;
    Ok((points, m))
}

/// Points `(t, t^2, ..., t^d)` at `t = i/n` for `i = 1..=n`.
pub fn moment_curve(n: usize, d: usize) -> Result<PointSet> {
    if n < d + 1 {
        return Err(Error::TooFewPoints { needed: d + 1, found: n });
    }
    let coords = (1..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (1..=d as i32).map(|k| t.powi(k)).collect()
        })
        .collect();
    PointSet::from_coords(d, coords, false)
}

/// Deterministic colorings of planar inputs used as adversarial cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructuredColoring {
    /// Alternating colors by lattice column.
    Stripes,
    /// Alternating colors by the parity of column plus row.
    Checkerboard,
    /// Left half one color, right half the other.
    HalfHalf,
    /// Alternating colors along diagonals.
    DiagonalStripes,
    /// Color 1 on a central disk, color 0 outside.
    Disk,
}

impl StructuredColoring {
    pub const ALL: [StructuredColoring; 5] = [
        StructuredColoring::Stripes,
        StructuredColoring::Checkerboard,
        StructuredColoring::HalfHalf,
        StructuredColoring::DiagonalStripes,
        StructuredColoring::Disk,
    ];

    /// Bi-coloring of points near the integer lattice.
    pub fn apply(self, points: &PointSet) -> Result<Coloring> {
        if points.dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: points.dim });
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &points.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p.coords[k]);
                hi[k] = hi[k].max(p.coords[k]);
            }
        }
        let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let radius = 0.3 * (hi[0] - lo[0]).min(hi[1] - lo[1]);
        let chi = points
            .points
            .iter()
            .map(|p| {
                let (x, y) = (p.coords[0], p.coords[1]);
                let (cx, cy) = (x.round() as i64, y.round() as i64);
                match self {
                    StructuredColoring::Stripes => cx.rem_euclid(2) as usize,
                    StructuredColoring::Checkerboard => (cx + cy).rem_euclid(2) as usize,
                    StructuredColoring::HalfHalf => usize::from(x > mid[0]),
                    StructuredColoring::DiagonalStripes => ((cx + cy).div_euclid(2)).rem_euclid(2) as usize,
                    StructuredColoring::Disk => usize::from((x - mid[0]).hypot(y - mid[1]) < radius),
                }
            })
            .collect();
        Coloring::new(1, chi)
    }
}
