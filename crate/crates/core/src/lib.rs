//! Chromatic Delaunay mosaics of colored point sets.
//!
//! A coloring `chi: A -> {0..=s}` of points in `R^d` is embedded in `R^(s+d)`
//! by placing color class `j` on the layer `u_j + R^d`, where the `u_j` are
//! the vertices of a standard simplex. The Delaunay mosaic of the embedded set
//! contains the Delaunay mosaic of every sub-coloring, projects onto the
//! Delaunay mosaic of the uncolored set, and its colorful cells are dual to the
//! overlay of the mono-chromatic Voronoi tessellations.
//!
//! Modules, bottom up:
//! - [`predicates`]: exact orientation / in-sphere signs with symbolic perturbation;
//! - [`delaunay`]: Delaunay mosaics in any dimension, bounded or periodic;
//! - [`chromatic`]: the chromatic embedding, restriction, and projection checks;
//! - [`overlay`]: overlays via membranes and via a direct arrangement oracle;
//! - [`ksets`]: brute-force spherical k-sets;
//! - [`constants`] and [`census`]: density constants and count algebra;
//! - [`sampling`] and [`experiment`]: seeded Poisson experiments.

pub mod census;
pub mod chromatic;
pub mod constants;
pub mod delaunay;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod ksets;
mod lp;
pub mod overlay;
pub mod predicates;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{lift, PointD, PointSet, Sign};
