//! `chromosaic`: generate colored point sets, build chromatic Delaunay
//! mosaics, count their faces, compare overlays and run experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! failure. `CHROMOSAIC_THREADS` caps the worker threads.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chromosaic::census::{mp_np, CountTable};
use chromosaic::chromatic::{chromatic_delaunay, Coloring};
use chromosaic::constants::constants_table;
use chromosaic::delaunay::face_counts;
use chromosaic::experiment::{run_experiment, summarize, ExperimentConfig, Generator, RunManifest};
use chromosaic::io;
use chromosaic::ksets::{all_spherical_ksets, spherical_ksets};
use chromosaic::overlay::{crossing_census, membrane_overlay, oracle_overlay, svg, vertices_match};
use chromosaic::sampling;
use chromosaic::verify::{verify, CheckKind, Status, VerifyReport};
use chromosaic::PointSet;

#[derive(Parser)]
#[command(name = "chromosaic", version, about = "Chromatic Delaunay mosaics and Voronoi overlays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a colored point file.
    Generate(GenerateArgs),
    /// Build the chromatic Delaunay mosaic and print face counts.
    Mosaic(MosaicArgs),
    /// Count faces by color signature.
    Count(CountArgs),
    /// Overlay of the mono-chromatic Voronoi tessellations.
    Overlay(OverlayArgs),
    /// Table of density constants.
    Constants(ConstantsArgs),
    /// Spherical k-sets of a small point file.
    Ksets(KsetsArgs),
    /// Repeated Poisson trials with per-trial censuses.
    Experiment(ExperimentArgs),
    /// Check the structural properties of chromatic mosaics.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Intensity of a Poisson process on the torus.
    #[arg(long)]
    rho: Option<f64>,
    /// Number of points of a perturbed lattice.
    #[arg(long)]
    grid: Option<usize>,
    /// Lattice jitter in units of the spacing.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Number of points on the moment curve.
    #[arg(long)]
    moment: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated color probabilities.
    #[arg(long, value_delimiter = ',')]
    bias: Option<Vec<f64>>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct MosaicArgs {
    file: PathBuf,
    /// Write the top cells as JSON lists of point indices.
    #[arg(long)]
    cells: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    file: PathBuf,
    /// Intensity used for normalization; points per unit volume by default.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args)]
struct OverlayArgs {
    file: PathBuf,
    /// Colors to overlay, comma-separated; all colors by default.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<usize>>,
    /// Cross-check against the direct arrangement.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the overlay vertices and edges as `<prefix>.vertices.csv` and
    /// `<prefix>.edges.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, default_value_t = 6)]
    dmax: usize,
    #[arg(long, default_value_t = 6)]
    decimals: usize,
}

#[derive(Args)]
struct KsetsArgs {
    file: PathBuf,
    /// Subset size; every size when absent.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    bias: Option<Vec<f64>>,
    /// Output CSV; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Point file to check; random instances when absent.
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    random: usize,
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Color and dimension pairs `s:d`, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1:1,1:2,2:2")]
    configs: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for counterexample files.
    #[arg(long, default_value = ".")]
    artifacts: PathBuf,
    /// Print the full JSON report.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Data(String),
    Verification(String),
}

impl From<chromosaic::Error> for Failure {
    fn from(e: chromosaic::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Writes to standard output, ignoring a closed pipe.
fn stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text)?,
        None => stdout(text),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Data(e.to_string()))
}

fn read_points(path: &Path) -> Result<io::ColoredPoints, Failure> {
    Ok(io::read(path)?)
}

fn generate(a: GenerateArgs) -> Outcome {
    let sources = [a.rho.is_some(), a.grid.is_some(), a.moment.is_some()].iter().filter(|&&b| b).count();
    if sources != 1 {
        return Err(Failure::Usage("give exactly one of --rho, --grid, --moment".into()));
    }
    let generator = match (a.grid, a.moment) {
        (Some(n), _) => Generator::PerturbedGrid { n, jitter: a.jitter },
        (_, Some(n)) => Generator::MomentCurve { n },
        _ => Generator::Poisson,
    };
    let config = ExperimentConfig {
        d: a.d,
        s: a.s,
        rho: a.rho.unwrap_or(1.0),
        trials: 1,
        seed: a.seed,
        bias: a.bias,
        generator: generator.clone(),
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let (points, chi) = config.sample(0).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = io::to_string(&points, &chi)?;
    emit(a.out.as_deref(), &text)?;
    let manifest_path = a.manifest.or_else(|| a.out.as_ref().map(|o| PathBuf::from(format!("{}.manifest.json", o.display()))));
    if let Some(mp) = manifest_path {
        let outputs = a.out.iter().map(|o| o.display().to_string()).collect();
        let mut manifest = RunManifest::new(&config, outputs);
        if matches!(generator, Generator::PerturbedGrid { .. }) {
            manifest.density = Some(sampling::density(&points)?);
        }
        fs::write(mp, json(&manifest)?)?;
    }
    Ok(())
}

fn mosaic(a: MosaicArgs) -> Outcome {
    let f = read_points(&a.file)?;
    let cm = chromatic_delaunay(&f.points, &f.coloring)?;
    let mut out = String::from("p,faces\n");
    for (p, n) in face_counts(&cm.base).iter().enumerate() {
        let _ = writeln!(out, "{p},{n}");
    }
    stdout(&out);
    if let Some(path) = a.cells {
        let cells: Vec<Vec<usize>> = cm
            .base
            .cells
            .iter()
            .map(|c| c.vertices().map(|v| cm.base.vertices[v].index).collect())
            .collect();
        fs::write(path, json(&cells)?)?;
    }
    Ok(())
}

fn default_rho(points: &PointSet) -> f64 {
    if points.periodic {
        return points.len() as f64;
    }
    // points per unit volume of the bounding box
    let mut vol = 1.0;
    for k in 0..points.dim {
        let (lo, hi) = points
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.coords[k]), hi.max(p.coords[k])));
        vol *= (hi - lo).max(f64::MIN_POSITIVE);
    }
    points.len() as f64 / vol
}

fn count(a: CountArgs) -> Outcome {
    let f = read_points(&a.file)?;
    let cm = chromatic_delaunay(&f.points, &f.coloring)?;
    let table = CountTable::from_mosaic(&cm);
    let rho = a.rho.unwrap_or_else(|| default_rho(&f.points));
    let report = mp_np(&table, rho)?;
    let mut out = String::from("quantity,value\n");
    for (sig, n) in &table.entries {
        let _ = writeln!(out, "{},{n}", CountTable::label(sig));
    }
    for (p, v) in report.m.iter().enumerate() {
        let _ = writeln!(out, "m_{p},{v}");
    }
    for (p, v) in report.n.iter().enumerate() {
        let _ = writeln!(out, "n_{p},{v}");
    }
    let _ = writeln!(out, "surplus,{}", report.surplus);
    let _ = writeln!(out, "rho,{rho:.6}");
    let _ = writeln!(out, "crossing_density,{:.6}", report.normalized_surplus);
    stdout(&out);
    Ok(())
}

fn overlay(a: OverlayArgs) -> Outcome {
    let f = read_points(&a.file)?;
    let tau = a.tau.unwrap_or_else(|| (0..=f.coloring.s).collect());
    if tau.iter().any(|&j| j > f.coloring.s) || tau.is_empty() {
        return Err(Failure::Usage(format!("--tau must list colors in 0..={}", f.coloring.s)));
    }
    let cm = chromatic_delaunay(&f.points, &f.coloring)?;
    let g = membrane_overlay(&cm, &tau)?;
    let mut out = String::from("quantity,membrane");
    let oracle = if a.oracle { Some(oracle_overlay(&f.points, &f.coloring, &tau)?) } else { None };
    if oracle.is_some() {
        out.push_str(",oracle");
    }
    out.push('\n');
    let row = |out: &mut String, name: &str, m: i64, o: Option<i64>| {
        let _ = write!(out, "{name},{m}");
        if let Some(o) = o {
            let _ = write!(out, ",{o}");
        }
        out.push('\n');
    };
    for (p, &c) in g.counts.iter().enumerate() {
        row(&mut out, &format!("cells_{p}"), c as i64, oracle.as_ref().map(|o| o.counts[p] as i64));
    }
    row(&mut out, "crossings", g.crossings() as i64, oracle.as_ref().map(|o| o.crossings() as i64));
    row(&mut out, "euler", g.euler(), oracle.as_ref().map(|o| o.euler()));
    if tau.len() == f.coloring.s + 1 {
        let census = crossing_census(&cm);
        row(&mut out, "surplus", census.surplus, None);
    }
    stdout(&out);
    if let Some(path) = a.svg {
        fs::write(path, svg::to_svg(&g)?)?;
    }
    if let Some(prefix) = a.csv {
        fs::write(format!("{}.vertices.csv", prefix.display()), svg::vertices_csv(&g))?;
        fs::write(format!("{}.edges.csv", prefix.display()), svg::edges_csv(&g))?;
    }
    if let Some(o) = oracle {
        if o.counts != g.counts || !vertices_match(&g, &o, 1e-6) {
            return Err(Failure::Verification("membrane and direct overlays differ".into()));
        }
    }
    Ok(())
}

fn constants(a: ConstantsArgs) -> Outcome {
    if a.dmax < 2 {
        return Err(Failure::Usage("--dmax must be at least 2".into()));
    }
    let k = a.decimals;
    let mut out = String::from("d,p,V,D,VD,X\n");
    for r in constants_table(a.dmax)? {
        let _ = writeln!(out, "{},{},{:.k$},{:.k$},{:.k$},{:.k$}", r.d, r.p, r.v, r.d_value, r.product, r.x);
    }
    stdout(&out);
    Ok(())
}

fn ksets(a: KsetsArgs) -> Outcome {
    let f = read_points(&a.file)?;
    let text = match a.k {
        Some(k) => json(&spherical_ksets(&f.points, k)?)?,
        None => json(&all_spherical_ksets(&f.points)?)?,
    };
    stdout(&format!("{text}\n"));
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Outcome {
    let config = ExperimentConfig {
        d: a.d,
        s: a.s,
        rho: a.rho,
        trials: a.trials,
        seed: a.seed,
        bias: a.bias,
        generator: Generator::Poisson,
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let results = run_experiment(&config)?;
    let summary = summarize(&results);
    let signatures: Vec<Vec<u32>> = summary.mean_counts.keys().cloned().collect();
    let mut out = String::from("trial,points,colorful_top,surplus,crossing_density,identities");
    for sig in &signatures {
        let _ = write!(out, ",{}", CountTable::label(sig));
    }
    out.push('\n');
    for r in &results {
        let _ = write!(
            out,
            "{},{},{},{},{:.6},{}",
            r.trial,
            r.points,
            r.colorful_top,
            r.report.surplus,
            r.report.normalized_surplus,
            if r.identities.holds() { "ok" } else { "FAIL" }
        );
        for sig in &signatures {
            let _ = write!(out, ",{}", r.table.get(sig));
        }
        out.push('\n');
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "trials,colorful_min,colorful_max,colorful_mean,crossing_mean,crossing_stddev");
    let stddev = summary.crossing_stddev.map(|s| format!("{s:.6}")).unwrap_or_default();
    let _ = writeln!(
        out,
        "{},{},{},{:.6},{:.6},{}",
        summary.trials, summary.colorful_min, summary.colorful_max, summary.colorful_mean, summary.crossing_mean, stddev
    );
    emit(a.out.as_deref(), &out)?;
    if let Some(o) = &a.out {
        let manifest = RunManifest::new(&config, vec![o.display().to_string()]);
        fs::write(format!("{}.manifest.json", o.display()), json(&manifest)?)?;
    }
    if summary.identity_failures > 0 {
        let msgs: Vec<String> = results.iter().flat_map(|r| r.identities.failures.iter().map(move |f| format!("trial {}: {f}", r.trial))).collect();
        return Err(Failure::Verification(msgs.join("; ")));
    }
    Ok(())
}

fn verify_one(points: &PointSet, chi: &Coloring, label: &str, artifacts: &Path) -> Result<VerifyReport, Failure> {
    let report = verify(points, chi)?;
    if !report.passed() {
        fs::create_dir_all(artifacts)?;
        let base = artifacts.join(format!("counterexample-{label}"));
        io::write(&base.with_extension("pts"), points, chi)?;
        let failures: Vec<_> = report.failures().cloned().collect();
        fs::write(base.with_extension("json"), json(&failures)?)?;
    }
    Ok(report)
}

fn verify_cmd(a: VerifyArgs) -> Outcome {
    let mut reports: Vec<(String, VerifyReport)> = Vec::new();
    if let Some(path) = &a.file {
        let f = read_points(path)?;
        reports.push(("file".into(), verify_one(&f.points, &f.coloring, "file", &a.artifacts)?));
    } else {
        let mut configs = Vec::new();
        for c in &a.configs {
            let parsed = c.split_once(':').and_then(|(s, d)| Some((s.parse::<usize>().ok()?, d.parse::<usize>().ok()?)));
            match parsed {
                Some((s, d)) if d >= 1 => configs.push((s, d)),
                _ => return Err(Failure::Usage(format!("invalid config `{c}`, expected s:d"))),
            }
        }
        for &(s, d) in &configs {
            for i in 0..a.random {
                let (points, chi) = random_instance(a.n, d, s, a.seed, i as u64)?;
                let label = format!("s{s}-d{d}-{i}");
                let r = verify_one(&points, &chi, &label, &a.artifacts)?;
                reports.push((label, r));
            }
        }
    }
    let mut out = String::from("check,instances,passed,failed,skipped\n");
    for (kind, name) in [(CheckKind::Restriction, "restriction"), (CheckKind::Lifting, "lifting"), (CheckKind::Membrane, "membrane")] {
        let (mut pass, mut fail, mut skip) = (0, 0, 0);
        for (_, r) in &reports {
            let checks: Vec<_> = r.checks.iter().filter(|c| c.kind == kind).collect();
            if checks.iter().any(|c| c.status == Status::Fail) {
                fail += 1;
            } else if checks.iter().any(|c| c.status == Status::Pass) {
                pass += 1;
            } else {
                skip += 1;
            }
        }
        let _ = writeln!(out, "{name},{},{pass},{fail},{skip}", reports.len());
    }
    stdout(&out);
    if a.json {
        stdout(&format!("{}\n", json(&reports)?));
    }
    let failed: Vec<&String> = reports.iter().filter(|(_, r)| !r.passed()).map(|(l, _)| l).collect();
    if !failed.is_empty() {
        return Err(Failure::Verification(format!("failing instances: {failed:?}")));
    }
    Ok(())
}

/// Uniform points with every color present at least `d + 2` times.
fn random_instance(n: usize, d: usize, s: usize, seed: u64, i: u64) -> Result<(PointSet, Coloring), Failure> {
    let min = (d + 2) * (s + 1);
    if n < min {
        return Err(Failure::Usage(format!("--n must be at least {min} for s={s}, d={d}")));
    }
    let mut rng = sampling::stream(seed, i);
    let coords = (0..n).map(|_| (0..d).map(|_| sampling::uniform(&mut rng)).collect()).collect();
    let points = PointSet::from_coords(d, coords, i % 2 == 1)?;
    let mut chi = sampling::random_coloring(n, s, seed.wrapping_add(i), None)?.chi;
    for (k, c) in chi.iter_mut().take(min).enumerate() {
        *c = k % (s + 1);
    }
    Ok((points, Coloring::new(s, chi)?))
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("CHROMOSAIC_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("CHROMOSAIC_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Mosaic(a) => mosaic(a),
        Command::Count(a) => count(a),
        Command::Overlay(a) => overlay(a),
        Command::Constants(a) => constants(a),
        Command::Ksets(a) => ksets(a),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(3)
        }
    }
}
