//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 1 7`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use chromosaic::census::CountTable;
use chromosaic::chromatic::chromatic_delaunay;
use chromosaic::constants::{constants_table, predicted_crossing_density, x_const, CrossingModel};
use chromosaic::delaunay::delaunay;
use chromosaic::experiment::{run_experiment, summarize, ExperimentConfig, TrialResult};
use chromosaic::ksets::all_spherical_ksets;
use chromosaic::overlay::membrane_overlay;
use chromosaic::sampling::{perturbed_grid, random_coloring, stream, uniform, StructuredColoring};
use chromosaic::verify::{verify_kind, CheckKind, Status};
use chromosaic::PointSet;

use common::{brute_force_delaunay, colored_instance, grid_instance};

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn within(measured: f64, target: f64, tol: f64) -> bool {
    ((measured - target) / target).abs() <= tol
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean of `N_sig / rho`, averaged over all color permutations of `sig`.
fn symmetric_density(runs: &[TrialResult], rho: f64, sig: &[u32]) -> f64 {
    let mut perms: Vec<Vec<u32>> = Vec::new();
    permute(&mut sig.to_vec(), 0, &mut perms);
    perms.sort();
    perms.dedup();
    mean(runs.iter().map(|r| mean(perms.iter().map(|p| r.table.get(p) as f64)) / rho))
}

fn permute(v: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

fn sum_of(r: &TrialResult, sigs: &[&[u32]]) -> f64 {
    sigs.iter().map(|s| r.table.get(s) as f64).sum()
}

struct Runs {
    plane_two: Vec<TrialResult>,
    plane_three: Vec<TrialResult>,
    space_two: Vec<TrialResult>,
    space_three: Vec<TrialResult>,
}

impl Runs {
    fn compute() -> Runs {
        let run = |d, s, rho, trials| run_experiment(&ExperimentConfig::poisson(d, s, rho, trials, SEED)).unwrap();
        Runs {
            plane_two: run(2, 1, 500.0, 20),
            plane_three: run(2, 2, 500.0, 20),
            space_two: run(3, 1, 200.0, 10),
            space_three: run(3, 2, 100.0, 6),
        }
    }
}

fn constants_table_entries() -> Check {
    let start = Instant::now();
    let rows = constants_table(6).map_err(|e| e.to_string())?;
    let printed: [(usize, usize, &str, &str); 15] = [
        (2, 1, "2.00", "1.27"),
        (3, 1, "5.83", "1.46"),
        (3, 2, "2.91", "2.92"),
        (4, 1, "23.96", "1.58"),
        (4, 2, "10.97", "3.66"),
        (4, 3, "3.72", "10.17"),
        (5, 1, "126.74", "1.67"),
        (5, 2, "53.22", "4.25"),
        (5, 3, "17.00", "13.30"),
        (5, 4, "4.45", "47.53"),
        (6, 1, "809.75", "1.74"),
        (6, 2, "316.00", "4.74"),
        (6, 3, "94.90", "16.11"),
        (6, 4, "23.68", "63.20"),
        (6, 5, "5.12", "274.93"),
    ];
    let xs = [(2, "1.27"), (3, "8.49"), (4, "57.88"), (5, "437.78"), (6, "3668.63")];
    let elapsed = start.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    for (d, p, v, dv) in printed {
        let row = rows.iter().find(|r| r.d == d && r.p == p).ok_or(format!("missing row d={d} p={p}"))?;
        if format!("{:.2}", row.v) != v {
            bad.push(format!("V({p},{d}) = {:.5}, printed {v}", row.v));
        }
        if format!("{:.2}", row.d_value) != dv {
            bad.push(format!("D({p},{d}) = {:.5}, printed {dv}", row.d_value));
        }
    }
    for (d, x) in xs {
        let value = x_const(d).map_err(|e| e.to_string())?;
        if format!("{value:.2}") != x {
            bad.push(format!("X_{d} = {value:.5}, printed {x}"));
        }
    }
    if elapsed >= 1.0 {
        bad.push(format!("took {elapsed:.2}s"));
    }
    if bad.is_empty() {
        Ok(format!("15 V/D pairs and 5 X values match to 2 decimals in {:.1} ms", elapsed * 1e3))
    } else {
        Err(bad.join("; "))
    }
}

fn plane_two_colors(runs: &Runs) -> Check {
    let target = 4.0 / PI;
    let m = mean(runs.plane_two.iter().map(|r| r.table.get(&[2, 2]) as f64 / 500.0));
    let msg = format!("mean N_22/rho = {m:.4} over {} trials, target {target:.4}", runs.plane_two.len());
    if within(m, target, 0.05) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn plane_three_colors(runs: &Runs) -> Check {
    let target = 8.0 / PI;
    let m = mean(runs.plane_three.iter().map(|r| sum_of(r, &[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]) / 500.0));
    let msg = format!("mean (N_022+N_202+N_220)/rho = {m:.4} over {} trials, target {target:.4}", runs.plane_three.len());
    if within(m, target, 0.05) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn space_two_colors(runs: &Runs) -> Check {
    let target = x_const(3).map_err(|e| e.to_string())?;
    let m = mean(runs.space_two.iter().map(|r| sum_of(r, &[&[2, 3], &[3, 2]]) / 200.0));
    let msg = format!("mean (N_23+N_32)/rho = {m:.4} over {} trials, target {target:.4}", runs.space_two.len());
    if within(m, target, 0.10) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scaled_densities(runs: &Runs) -> Check {
    let n11 = mean(runs.plane_two.iter().map(|r| r.table.get(&[1, 1]) as f64 / 500.0));
    let n22 = mean(runs.space_two.iter().map(|r| r.table.get(&[2, 2]) as f64 / 200.0));
    let msg = format!("plane N_11/rho = {n11:.4} (target 2.2748), space N_22/rho = {n22:.4} (target 12.7938)");
    if within(n11, 2.2748, 0.05) && within(n22, 12.7938, 0.10) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn tri_colored_space(runs: &Runs) -> Check {
    let rho = 100.0;
    let reference: [(&[u32], f64); 16] = [
        (&[0, 0, 1], 332.7),
        (&[0, 0, 2], 2585.6),
        (&[0, 1, 1], 3491.8),
        (&[0, 0, 3], 4505.7),
        (&[0, 1, 2], 8237.4),
        (&[1, 1, 1], 12678.0),
        (&[0, 0, 4], 2252.8),
        (&[0, 1, 3], 7331.2),
        (&[0, 2, 2], 8478.8),
        (&[1, 1, 2], 17092.8),
        (&[0, 1, 4], 2252.8),
        (&[0, 2, 3], 2825.6),
        (&[1, 1, 3], 10150.7),
        (&[1, 2, 2], 11696.5),
        (&[1, 1, 4], 2252.8),
        (&[2, 2, 2], 3217.8),
    ];
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (sig, at_thousand) in reference {
        let m = symmetric_density(&runs.space_three, rho, sig);
        let target = at_thousand / 1000.0;
        worst = worst.max(((m - target) / target).abs());
        if !within(m, target, 0.15) {
            bad.push(format!("{}: {m:.3} vs {target:.3}", CountTable::label(sig)));
        }
    }
    if bad.is_empty() {
        Ok(format!("16 normalized counts within {:.1}% at rho = 100", worst * 100.0))
    } else {
        Err(bad.join("; "))
    }
}

fn exact_identities(runs: &Runs) -> Check {
    let mut bad = Vec::new();
    let mut trials = 0;
    let all = [&runs.plane_two, &runs.plane_three, &runs.space_two, &runs.space_three];
    for r in all.into_iter().flatten() {
        trials += 1;
        let t = &r.table;
        bad.extend(r.identities.failures.iter().map(|f| format!("d={} s={} trial {}: {f}", t.d, t.s, r.trial)));
        let (d, s) = (t.d, t.s);
        let named: &[(&[u32], &[u32])] = match (d, s) {
            (2, 1) => &[(&[0, 3], &[1, 3]), (&[3, 0], &[3, 1])],
            (3, 1) => &[(&[0, 4], &[1, 4]), (&[4, 0], &[4, 1])],
            _ => &[],
        };
        for (a, b) in named {
            if t.get(a) != t.get(b) {
                bad.push(format!("trial {}: {} != {}", r.trial, CountTable::label(a), CountTable::label(b)));
            }
        }
        if d == 2 {
            let n = &r.report.n;
            if n[0] as i64 - n[1] as i64 + n[2] as i64 != 0 {
                bad.push(format!("trial {}: overlay Euler characteristic nonzero", r.trial));
            }
        }
        if t.euler_characteristic() != 0 {
            bad.push(format!("trial {}: alternating sum {}", r.trial, t.euler_characteristic()));
        }
    }
    if bad.is_empty() {
        Ok(format!("all identities hold exactly on {trials} trials"))
    } else {
        Err(bad.join("; "))
    }
}

fn structural_checks() -> Check {
    let start = Instant::now();
    let mut summary = Vec::new();
    let mut bad = Vec::new();
    for (s, d) in [(1, 1), (1, 2), (2, 2)] {
        let mut rng = stream(SEED, 100 + (s * 10 + d) as u64);
        let min = (d + 2) * (s + 1);
        let mut passed = [0usize; 3];
        for i in 0..50 {
            let n = min + (uniform(&mut rng) * (41 - min) as f64) as usize;
            let (points, chi) = colored_instance(n, d, s, i % 2 == 1, SEED + i as u64);
            for (k, kind) in [CheckKind::Restriction, CheckKind::Lifting, CheckKind::Membrane].into_iter().enumerate() {
                let report = verify_kind(&points, &chi, kind).map_err(|e| format!("s={s} d={d} #{i}: {e}"))?;
                if !report.passed() {
                    bad.push(format!("s={s} d={d} #{i} {kind:?}: {:?}", report.failures().next()));
                } else if report.checks.iter().any(|c| c.status == Status::Pass) {
                    passed[k] += 1;
                }
            }
        }
        if passed.iter().any(|&p| p < 50) {
            bad.push(format!("s={s} d={d}: only {passed:?} of 50 instances exercised each check"));
        }
        summary.push(format!("(s={s},d={d})"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 120.0 {
        bad.push(format!("took {elapsed:.0}s"));
    }
    if bad.is_empty() {
        Ok(format!("restriction, lifting and membrane pass on 50 instances each of {} in {elapsed:.1}s", summary.join(" ")))
    } else {
        Err(bad.join("; "))
    }
}

fn delaunay_oracle() -> Check {
    let mut rng = stream(SEED, 8);
    let mut done = 0;
    let mut seed = SEED;
    let mut bad = Vec::new();
    while done < 100 {
        seed += 1;
        let d = 1 + done % 4;
        let n = d + 2 + (uniform(&mut rng) * (29 - d) as f64) as usize;
        let (points, ints) = grid_instance(n, d, seed);
        let Some(expected) = brute_force_delaunay(&ints) else {
            continue;
        };
        let m = delaunay(&points).map_err(|e| format!("d={d} n={n}: {e}"))?;
        let mut found: Vec<Vec<usize>> =
            m.cells.iter().map(|c| c.vertices().map(|v| m.vertices[v].index).collect::<Vec<_>>()).collect();
        for c in found.iter_mut() {
            c.sort_unstable();
        }
        found.sort();
        if found != expected {
            bad.push(format!("d={d} n={n} seed {seed}: {} cells vs {} expected", found.len(), expected.len()));
        }
        done += 1;
    }
    if bad.is_empty() {
        Ok("100 instances with d <= 4, n <= 30 match the empty-sphere enumeration".into())
    } else {
        Err(bad.join("; "))
    }
}

fn kset_bound() -> Check {
    let mut rng = stream(SEED, 9);
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 3 + (uniform(&mut rng) * 10.0) as usize;
        let coords = (0..n).map(|_| vec![uniform(&mut rng), uniform(&mut rng)]).collect();
        let points = PointSet::from_coords(2, coords, false).unwrap();
        for r in all_spherical_ksets(&points).map_err(|e| e.to_string())? {
            let bound = 2 * r.k * n;
            worst = worst.max(r.count as f64 / bound as f64);
            if r.count >= bound {
                bad.push(format!("instance {i}: n={n} k={} count {} >= {bound}", r.k, r.count));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("50 planar instances, largest count / 2kn = {worst:.3}"))
    } else {
        Err(bad.join("; "))
    }
}

fn dense_grids() -> Check {
    let mut bad = Vec::new();
    let mut fits = Vec::new();
    let sizes = [100usize, 400, 900];
    let names = ["uniform", "stripes", "checkerboard", "half/half", "diagonal", "disk"];
    let mut regions = vec![Vec::new(); names.len()];
    let mut worst: f64 = 0.0;
    for &n in &sizes {
        let (points, m) = perturbed_grid(n, 0.25, 2, SEED).map_err(|e| e.to_string())?;
        let mut colorings = vec![random_coloring(points.len(), 1, SEED, None).map_err(|e| e.to_string())?];
        for sc in StructuredColoring::ALL {
            colorings.push(sc.apply(&points).map_err(|e| e.to_string())?);
        }
        for (c, chi) in colorings.iter().enumerate() {
            let cm = chromatic_delaunay(&points, chi).map_err(|e| e.to_string())?;
            let g = membrane_overlay(&cm, &[0, 1]).map_err(|e| e.to_string())?;
            let crossings = g.crossings() as f64;
            worst = worst.max(crossings / (1930.0 * m * m));
            if crossings > 1930.0 * m * m {
                bad.push(format!("n={n} {}: {crossings} crossings > 1930 m^2 (m = {m:.2})", names[c]));
            }
            regions[c].push(g.counts[2] as f64);
        }
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    for (c, ys) in regions.iter().enumerate() {
        let (mx, my) = (mean(xs.iter().copied()), mean(ys.iter().copied()));
        let slope = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let icpt = my - slope * mx;
        let residual = xs.iter().zip(ys).map(|(x, y)| ((y - (slope * x + icpt)) / y).abs()).fold(0.0, f64::max);
        fits.push(format!("{} {slope:.2}n{icpt:+.0}", names[c]));
        if residual >= 0.15 {
            bad.push(format!("{}: regions {ys:?} deviate {:.1}% from the linear fit", names[c], residual * 100.0));
        }
    }
    if bad.is_empty() {
        Ok(format!("crossings <= {:.4} of 1930 m^2; regions fit {}", worst, fits.join(", ")))
    } else {
        Err(bad.join("; "))
    }
}

fn biased_colorings() -> Check {
    let rho = 500.0;
    let mut bad = Vec::new();
    let mut measured = Vec::new();
    for i in 1..=9 {
        let lambda = i as f64 / 10.0;
        let mut config = ExperimentConfig::poisson(2, 1, rho, 40, SEED);
        config.bias = Some(vec![lambda, 1.0 - lambda]);
        let results = run_experiment(&config).map_err(|e| e.to_string())?;
        let density = mean(results.iter().map(|r| r.table.get(&[2, 2]) as f64));
        let target = predicted_crossing_density(CrossingModel::BiasedPlane { lambda, rho }).map_err(|e| e.to_string())?;
        if summarize(&results).identity_failures > 0 {
            bad.push(format!("lambda {lambda}: identity failures"));
        }
        if !within(density, target, 0.10) {
            bad.push(format!("lambda {lambda}: {density:.1} vs {target:.1}"));
        }
        measured.push(density);
    }
    let argmax = (0..9).max_by(|&a, &b| measured[a].total_cmp(&measured[b])).unwrap();
    if argmax != 4 {
        bad.push(format!("maximum at lambda {:.1}", (argmax + 1) as f64 / 10.0));
    }
    let shown: Vec<String> = measured.iter().map(|m| format!("{m:.0}")).collect();
    if bad.is_empty() {
        Ok(format!("crossing densities [{}] within 10%, maximum at 0.5", shown.join(" ")))
    } else {
        Err(bad.join("; "))
    }
}

fn report(label: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("{label}: PASS ({secs:.1}s) {detail}");
            true
        }
        Err(detail) => {
            println!("{label}: FAIL ({secs:.1}s) {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wants = |k: usize| selected.is_empty() || selected.contains(&k);
    let runs = (2..=6).any(wants).then(Runs::compute);
    let runs = runs.as_ref();
    let mut ok = true;
    if wants(1) {
        ok &= report("criterion 1 constants table", constants_table_entries);
    }
    if let Some(runs) = runs {
        if wants(2) {
            ok &= report("criterion 2 planar crossings, two colors", || plane_two_colors(runs));
        }
        if wants(3) {
            ok &= report("criterion 3 planar crossings, three colors", || plane_three_colors(runs));
        }
        if wants(4) {
            ok &= report("criterion 4 spatial crossings, two colors", || space_two_colors(runs));
            ok &= report("criterion 4 tri-colored space at reduced intensity", || tri_colored_space(runs));
        }
        if wants(5) {
            ok &= report("criterion 5 scaled densities", || scaled_densities(runs));
        }
        if wants(6) {
            ok &= report("criterion 6 exact identities", || exact_identities(runs));
        }
    }
    if wants(7) {
        ok &= report("criterion 7 structural checks", structural_checks);
    }
    if wants(8) {
        ok &= report("criterion 8 Delaunay oracle", delaunay_oracle);
    }
    if wants(9) {
        ok &= report("criterion 9 k-set bound", kset_bound);
    }
    if wants(10) {
        ok &= report("criterion 10 dense grids", dense_grids);
    }
    if wants(11) {
        ok &= report("criterion 11 biased colorings", biased_colorings);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
