//! Mechanical checks of the structural properties of chromatic mosaics on
//! concrete inputs:
//!
//! - restriction: the `tau`-colored faces form the chromatic mosaic of the
//!   points with colors in `tau`, built independently;
//! - lifting: every face of the Delaunay mosaic of the uncolored points is a
//!   face of the chromatic mosaic;
//! - membrane: the overlay read off the `tau`-membrane equals the overlay of
//!   the Voronoi tessellations built directly (for `d <= 2`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::chromatic::{
    abstract_complex, chromatic_delaunay, color_mask, lift_check, AbstractFace, ChromaticMosaic, Coloring,
};
use crate::delaunay::{self, faces};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::overlay::{membrane_overlay, oracle_overlay, vertices_match};

/// Tolerance on overlay vertex positions.
pub const VERTEX_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    Restriction,
    Lifting,
    Membrane,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply, e.g. a color class too small to span.
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub kind: CheckKind,
    pub tau: Vec<usize>,
    pub status: Status,
    /// Offending faces or counts, when the check fails.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed_kind(&self, kind: CheckKind) -> bool {
        self.checks.iter().filter(|c| c.kind == kind).all(|c| c.status != Status::Fail)
    }
}

/// Non-empty proper subsets of `0..=s`, then the full set.
fn color_subsets(s: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << (s + 1))).map(|m| (0..=s).filter(|j| m & (1 << j) != 0).collect()).collect()
}

fn tau_colored_faces(cm: &ChromaticMosaic, tau: &[usize]) -> BTreeSet<AbstractFace> {
    let mask = color_mask(tau);
    (0..=cm.base.dimension)
        .flat_map(|p| faces(&cm.base, p))
        .filter(|f| cm.signature(f).is_colored(mask))
        .map(|f| {
            let mut v: AbstractFace = f.refs().iter().map(|r| (cm.base.vertices[r.vertex].index, r.shift)).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

fn is_too_small(e: &Error) -> bool {
    matches!(e, Error::TooFewPoints { .. } | Error::AffinelyDependent)
}

fn restriction(points: &PointSet, chi: &Coloring, cm: &ChromaticMosaic, tau: &[usize]) -> Result<CheckOutcome> {
    let keep: Vec<usize> = (0..points.len()).filter(|&i| tau.contains(&chi.chi[i])).collect();
    let sub = points.subset(&keep);
    let sub_chi = Coloring::new(
        tau.len() - 1,
        keep.iter().map(|&i| tau.iter().position(|&c| c == chi.chi[i]).expect("color in tau")).collect(),
    )?;
    let outcome = |status, counterexample| CheckOutcome { kind: CheckKind::Restriction, tau: tau.to_vec(), status, counterexample };
    let independent = if tau.len() == 1 {
        if points.periodic {
            delaunay::delaunay_periodic(&sub, points.dim)
        } else {
            delaunay::delaunay(&sub)
        }
    } else {
        chromatic_delaunay(&sub, &sub_chi).map(|m| m.base)
    };
    let independent = match independent {
        Ok(m) => m,
        Err(e) if is_too_small(&e) => return Ok(outcome(Status::Skipped(e.to_string()), None)),
        Err(e) => return Err(e),
    };
    let expected: BTreeSet<AbstractFace> = abstract_complex(&independent).into_iter().collect();
    let found = tau_colored_faces(cm, tau);
    if expected == found {
        return Ok(outcome(Status::Pass, None));
    }
    let missing: Vec<&AbstractFace> = expected.difference(&found).take(5).collect();
    let extra: Vec<&AbstractFace> = found.difference(&expected).take(5).collect();
    Ok(outcome(Status::Fail, Some(format!("missing faces {missing:?}; unexpected faces {extra:?}"))))
}

fn lifting(points: &PointSet, chi: &Coloring) -> Result<CheckOutcome> {
    let all: Vec<usize> = (0..=chi.s).collect();
    let outcome = |status, counterexample| CheckOutcome { kind: CheckKind::Lifting, tau: all.clone(), status, counterexample };
    match lift_check(points, chi) {
        Ok(r) if r.violations.is_empty() => Ok(outcome(Status::Pass, None)),
        Ok(r) => Ok(outcome(Status::Fail, Some(format!("faces not lifted: {:?}", &r.violations[..r.violations.len().min(5)])))),
        Err(e) if is_too_small(&e) => Ok(outcome(Status::Skipped(e.to_string()), None)),
        Err(e) => Err(e),
    }
}

fn membrane(points: &PointSet, chi: &Coloring, cm: &ChromaticMosaic, tau: &[usize]) -> Result<CheckOutcome> {
    let outcome = |status, counterexample| CheckOutcome { kind: CheckKind::Membrane, tau: tau.to_vec(), status, counterexample };
    if points.dim > 2 {
        return Ok(outcome(Status::Skipped("direct overlays exist only for d <= 2".into()), None));
    }
    if tau.iter().any(|&j| chi.class(j).len() < points.dim + 1) {
        return Ok(outcome(Status::Skipped("a color class cannot span".into()), None));
    }
    let m = membrane_overlay(cm, tau)?;
    let o = match oracle_overlay(points, chi, tau) {
        Ok(o) => o,
        Err(e) if is_too_small(&e) => return Ok(outcome(Status::Skipped(e.to_string()), None)),
        Err(e) => return Err(e),
    };
    if m.counts != o.counts {
        return Ok(outcome(Status::Fail, Some(format!("membrane counts {:?}, direct counts {:?}", m.counts, o.counts))));
    }
    if !vertices_match(&m, &o, VERTEX_TOLERANCE) {
        return Ok(outcome(Status::Fail, Some("overlay vertices differ beyond tolerance".into())));
    }
    Ok(outcome(Status::Pass, None))
}

/// Runs every check on one colored point set.
pub fn verify(points: &PointSet, chi: &Coloring) -> Result<VerifyReport> {
    let cm = chromatic_delaunay(points, chi)?;
    let mut report = VerifyReport::default();
    let subsets = color_subsets(chi.s);
    for tau in subsets.iter().filter(|t| t.len() <= chi.s) {
        report.checks.push(restriction(points, chi, &cm, tau)?);
    }
    report.checks.push(lifting(points, chi)?);
    for tau in &subsets {
        report.checks.push(membrane(points, chi, &cm, tau)?);
    }
    Ok(report)
}

/// Runs only the checks of one kind.
pub fn verify_kind(points: &PointSet, chi: &Coloring, kind: CheckKind) -> Result<VerifyReport> {
    let cm = chromatic_delaunay(points, chi)?;
    let subsets = color_subsets(chi.s);
    let checks = match kind {
        CheckKind::Restriction => subsets
            .iter()
            .filter(|t| t.len() <= chi.s)
            .map(|tau| restriction(points, chi, &cm, tau))
            .collect::<Result<Vec<_>>>()?,
        CheckKind::Lifting => vec![lifting(points, chi)?],
        CheckKind::Membrane => subsets.iter().map(|tau| membrane(points, chi, &cm, tau)).collect::<Result<Vec<_>>>()?,
    };
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn instance(n: usize, d: usize, s: usize, periodic: bool, seed: u64) -> (PointSet, Coloring) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
        let chi = (0..n).map(|i| if i < (d + 2) * (s + 1) { i % (s + 1) } else { rng.gen_range(0..=s) }).collect();
        (PointSet::from_coords(d, coords, periodic).unwrap(), Coloring::new(s, chi).unwrap())
    }

    #[test]
    fn random_instances_pass() {
        for (seed, (s, d)) in [(1, 1), (1, 2), (2, 2)].into_iter().enumerate() {
            for periodic in [false, true] {
                let (ps, chi) = instance(25, d, s, periodic, seed as u64);
                let r = verify(&ps, &chi).unwrap();
                assert!(r.passed(), "s {s} d {d} periodic {periodic}: {:?}", r.failures().collect::<Vec<_>>());
                assert!(r.checks.iter().any(|c| c.status == Status::Pass && c.kind == CheckKind::Membrane));
                assert!(r.checks.iter().any(|c| c.status == Status::Pass && c.kind == CheckKind::Restriction));
            }
        }
    }

    #[test]
    fn spatial_instance_skips_the_membrane() {
        let (ps, chi) = instance(20, 3, 1, false, 4);
        let r = verify(&ps, &chi).unwrap();
        assert!(r.passed());
        assert!(r.checks.iter().filter(|c| c.kind == CheckKind::Membrane).all(|c| matches!(c.status, Status::Skipped(_))));
    }

    #[test]
    fn tiny_class_is_skipped() {
        let ps = PointSet::from_coords(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.1], vec![0.3, 1.0], vec![0.8, 0.7], vec![0.5, 0.4]],
            false,
        )
        .unwrap();
        let chi = Coloring::new(1, vec![0, 0, 0, 0, 1]).unwrap();
        let r = verify(&ps, &chi).unwrap();
        assert!(r.passed());
        assert!(r.checks.iter().any(|c| matches!(c.status, Status::Skipped(_))));
    }
}
