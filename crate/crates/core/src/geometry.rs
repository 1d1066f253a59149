use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::{Mul, Neg};

use crate::error::{Error, Result};

/// A point in `d`-dimensional Euclidean space. `index` is the point's
/// identity; it keys the symbolic perturbation and must be unique within a
/// [`PointSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointD {
    pub coords: Vec<f64>,
    pub index: usize,
}

impl PointD {
    pub fn new(index: usize, coords: Vec<f64>) -> Self {
        PointD { coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn squared_distance(&self, other: &PointD) -> f64 {
        squared_distance(&self.coords, &other.coords)
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Paraboloid lift `(p_1, ..., p_d, |p|^2)`, keeping the index.
pub fn lift(p: &PointD) -> PointD {
    let mut coords = p.coords.clone();
    coords.push(p.coords.iter().map(|x| x * x).sum());
    PointD { coords, index: p.index }
}

/// Sign of a determinant-valued predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i32(v: i32) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::from_i32(-self.as_i32())
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i32(self.as_i32() * rhs.as_i32())
    }
}

/// A finite point set in `R^dim`. With `periodic` set, the coordinates are
/// read on the unit torus `[0,1)^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub dim: usize,
    pub points: Vec<PointD>,
    pub periodic: bool,
}

impl PointSet {
    /// Builds a set from raw coordinates, indexing the points `0..n`.
    pub fn from_coords(dim: usize, coords: Vec<Vec<f64>>, periodic: bool) -> Result<Self> {
        let points = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| PointD::new(i, c))
            .collect();
        let set = PointSet { dim, points, periodic };
        set.validate()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let mut seen = HashSet::with_capacity(self.points.len());
        for p in &self.points {
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
            }
            if p.coords.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("point {} has a non-finite coordinate", p.index)));
            }
            if !seen.insert(p.index) {
                return Err(Error::InvalidInput(format!("duplicate point index {}", p.index)));
            }
            if self.periodic && p.coords.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                return Err(Error::InvalidInput(format!(
                    "periodic point {} lies outside [0,1)",
                    p.index
                )));
            }
        }
        Ok(())
    }

    /// The subset of points whose positions are listed in `keep`.
    pub fn subset(&self, keep: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: keep.iter().map(|&i| self.points[i].clone()).collect(),
            periodic: self.periodic,
        }
    }
}
