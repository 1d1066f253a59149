//! Seeded Poisson experiments on the torus: per-trial censuses of the
//! chromatic Delaunay mosaic and summaries across trials.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{mean_table, mp_np, CountTable, DensityReport};
use crate::chromatic::{chromatic_delaunay_with, ChromaticOptions, Coloring};
use crate::delaunay::PeriodicOptions;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::sampling::{self, stream};

/// How the points of a trial are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    Poisson,
    PerturbedGrid { n: usize, jitter: f64 },
    MomentCurve { n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub s: usize,
    /// Expected points per unit volume.
    pub rho: f64,
    pub trials: usize,
    pub seed: u64,
    /// Color probabilities; uniform when absent.
    pub bias: Option<Vec<f64>>,
    pub generator: Generator,
}

impl ExperimentConfig {
    pub fn poisson(d: usize, s: usize, rho: f64, trials: usize, seed: u64) -> Self {
        ExperimentConfig { d, s, rho, trials, seed, bias: None, generator: Generator::Poisson }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {}", self.rho)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("need at least one trial".into()));
        }
        if let Some(w) = &self.bias {
            if w.len() != self.s + 1 || w.iter().any(|&x| !(x >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("bias must be {} nonnegative weights summing to 1", self.s + 1)));
            }
        }
        Ok(())
    }

    /// Stream ids of trial `t`: points, then colors.
    pub fn trial_streams(t: usize) -> (u64, u64) {
        (2 * t as u64, 2 * t as u64 + 1)
    }

    /// Points and colors of trial `t`.
    pub fn sample(&self, t: usize) -> Result<(PointSet, Coloring)> {
        let (ps, cs) = Self::trial_streams(t);
        let points = match self.generator {
            Generator::Poisson => sampling::poisson_torus_stream(self.rho, self.d, &mut stream(self.seed, ps))?,
            Generator::PerturbedGrid { n, jitter } => {
                sampling::perturbed_grid(n, jitter, self.d, self.seed.wrapping_add(ps))?.0
            }
            Generator::MomentCurve { n } => sampling::moment_curve(n, self.d)?,
        };
        let chi = sampling::random_coloring_stream(points.len(), self.s, self.bias.as_deref(), &mut stream(self.seed, cs))?;
        Ok((points, chi))
    }
}

/// Exact integer identities that every periodic trial must satisfy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub failures: Vec<String>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the identities of a periodic census: cells with one extra vertex
/// of a new color pair up with the mono-chromatic top cells, every color's
/// Delaunay mosaic and the overlay have Euler characteristic zero, and so
/// does the chromatic mosaic.
pub fn check_identities(table: &CountTable, report: &DensityReport) -> IdentityCheck {
    let (s, d) = (table.s, table.d);
    let mut failures = Vec::new();
    for j in 0..=s {
        for i in (0..=s).filter(|&i| i != j) {
            let mut top = vec![0u32; s + 1];
            top[j] = d as u32 + 1;
            let mut up = top.clone();
            up[i] = 1;
            if table.get(&top) != table.get(&up) {
                failures.push(format!(
                    "{} = {} but {} = {}",
                    CountTable::label(&top),
                    table.get(&top),
                    CountTable::label(&up),
                    table.get(&up)
                ));
            }
        }
        let euler: i64 = table
            .entries
            .iter()
            .filter(|(k, _)| k.iter().enumerate().all(|(c, &u)| (c == j) == (u > 0)))
            .map(|(k, &v)| if k[j] % 2 == 1 { v as i64 } else { -(v as i64) })
            .sum();
        if euler != 0 {
            failures.push(format!("color {j} Delaunay mosaic has Euler characteristic {euler}"));
        }
    }
    let overlay: i64 = report.n.iter().enumerate().map(|(p, &v)| if p % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
    if overlay != 0 {
        failures.push(format!("overlay has Euler characteristic {overlay}"));
    }
    let total = table.euler_characteristic();
    if total != 0 {
        failures.push(format!("chromatic mosaic has Euler characteristic {total}"));
    }
    IdentityCheck { failures }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub points: usize,
    pub table: CountTable,
    pub report: DensityReport,
    /// Top cells that use every color.
    pub colorful_top: u64,
    pub identities: IdentityCheck,
}

/// Replication margin used for experiments; the construction widens it on
/// demand.
pub const EXPERIMENT_MARGIN: f64 = 0.5;

/// Runs one trial.
pub fn run_trial(config: &ExperimentConfig, t: usize) -> Result<TrialResult> {
    let (points, chi) = config.sample(t)?;
    let opts = ChromaticOptions {
        periodic: PeriodicOptions { margin: EXPERIMENT_MARGIN, ..PeriodicOptions::default() },
        ..ChromaticOptions::default()
    };
    let cm = chromatic_delaunay_with(&points, &chi, &opts)?;
    let table = CountTable::from_mosaic(&cm);
    let report = mp_np(&table, config.rho)?;
    let identities = if points.periodic { check_identities(&table, &report) } else { IdentityCheck::default() };
    Ok(TrialResult { trial: t, points: points.len(), colorful_top: report.n[0], table, report, identities })
}

/// Min, max and mean of the colorful top cells; mean and sample standard
/// deviation of the normalized crossing density. The deviation is `None`
/// for a single trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub colorful_min: u64,
    pub colorful_max: u64,
    pub colorful_mean: f64,
    pub crossing_mean: f64,
    pub crossing_stddev: Option<f64>,
    pub mean_counts: BTreeMap<Vec<u32>, f64>,
    pub identity_failures: usize,
}

pub fn summarize(results: &[TrialResult]) -> Summary {
    let n = results.len();
    let colorful: Vec<u64> = results.iter().map(|r| r.colorful_top).collect();
    let crossings: Vec<f64> = results.iter().map(|r| r.report.normalized_surplus).collect();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    let cm = mean(&crossings);
    let stddev = (n > 1).then(|| (crossings.iter().map(|x| (x - cm).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
    let tables: Vec<CountTable> = results.iter().map(|r| r.table.clone()).collect();
    Summary {
        trials: n,
        colorful_min: colorful.iter().copied().min().unwrap_or(0),
        colorful_max: colorful.iter().copied().max().unwrap_or(0),
        colorful_mean: mean(&colorful.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        crossing_mean: cm,
        crossing_stddev: stddev,
        mean_counts: mean_table(&tables),
        identity_failures: results.iter().filter(|r| !r.identities.holds()).count(),
    }
}

/// Runs all trials in parallel on the current rayon pool; results are in
/// trial order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    (0..config.trials).into_par_iter().map(|t| run_trial(config, t)).collect()
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub code_version: String,
    /// Seed and the (points, colors) stream ids of each trial.
    pub trial_streams: Vec<(u64, u64, u64)>,
    pub outputs: Vec<String>,
    /// Density of a generated lattice, when there is one.
    pub density: Option<f64>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, outputs: Vec<String>) -> Self {
        RunManifest {
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            trial_streams: (0..config.trials)
                .map(|t| {
                    let (p, c) = ExperimentConfig::trial_streams(t);
                    (config.seed, p, c)
                })
                .collect(),
            outputs,
            density: None,
        }
    }
}
