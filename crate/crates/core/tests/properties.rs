mod common;

use proptest::prelude::*;

use chromosaic::census::{mp_np, CountTable};
use chromosaic::chromatic::{chromatic_delaunay, Coloring};
use chromosaic::delaunay::{delaunay, delaunay_periodic, face_counts};
use chromosaic::experiment::{check_identities, run_trial, ExperimentConfig};
use chromosaic::io;
use chromosaic::ksets::{is_separable, spherical_ksets};
use chromosaic::overlay::{membrane_overlay, oracle_overlay};
use chromosaic::PointSet;

use common::{brute_force_delaunay, grid_instance};

fn sorted_cells(points: &PointSet) -> Vec<Vec<usize>> {
    let m = delaunay(points).unwrap();
    let mut cells: Vec<Vec<usize>> = m
        .cells
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.vertices().map(|v| m.vertices[v].index).collect();
            v.sort_unstable();
            v
        })
        .collect();
    cells.sort();
    cells
}

fn planar(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n)
        .prop_map(|v| PointSet::from_coords(2, v.into_iter().map(|(x, y)| vec![x, y]).collect(), false).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangulation_matches_empty_sphere_enumeration(d in 1usize..=3, extra in 1usize..=12, seed in any::<u64>()) {
        let (points, ints) = grid_instance(d + 1 + extra, d, seed);
        if let Some(expected) = brute_force_delaunay(&ints) {
            prop_assert_eq!(sorted_cells(&points), expected);
        }
    }

    #[test]
    fn triangulation_ignores_input_order(points in planar(4..=25), rot in 0usize..25) {
        let n = points.len();
        let rotated = PointSet::from_coords(
            2,
            (0..n).map(|i| points.points[(i + rot) % n].coords.clone()).collect(),
            false,
        ).unwrap();
        let mut back: Vec<Vec<usize>> = sorted_cells(&rotated)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|i| (i + rot) % n).collect();
                v.sort_unstable();
                v
            })
            .collect();
        back.sort();
        prop_assert_eq!(sorted_cells(&points), back);
    }

    #[test]
    fn planar_bounded_euler_formula(points in planar(3..=30)) {
        let c = face_counts(&delaunay(&points).unwrap());
        prop_assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64, 1);
    }

    #[test]
    fn torus_mosaics_have_zero_euler_characteristic(d in 1usize..=3, n in 4usize..=30, seed in any::<u64>()) {
        let points = chromosaic::sampling::poisson_torus(n as f64, d, seed).unwrap();
        prop_assume!(points.len() > d + 1);
        let m = delaunay_periodic(&points, 1).unwrap();
        prop_assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn chromatic_counts_satisfy_identities(d in 1usize..=2, s in 1usize..=2, seed in any::<u64>()) {
        let config = ExperimentConfig::poisson(d, s, 40.0, 1, seed);
        let r = run_trial(&config, 0).unwrap();
        prop_assert!(r.identities.holds(), "{:?}", r.identities.failures);
        let again = check_identities(&r.table, &mp_np(&r.table, 40.0).unwrap());
        prop_assert!(again.holds());
    }

    #[test]
    fn membrane_matches_direct_overlay(points in planar(8..=24), colors in prop::collection::vec(0usize..=1, 24)) {
        let n = points.len();
        let mut chi: Vec<usize> = colors[..n].to_vec();
        for (k, c) in chi.iter_mut().take(6).enumerate() {
            *c = k % 2;
        }
        let chi = Coloring::new(1, chi).unwrap();
        let cm = chromatic_delaunay(&points, &chi).unwrap();
        let m = membrane_overlay(&cm, &[0, 1]).unwrap();
        let o = oracle_overlay(&points, &chi, &[0, 1]).unwrap();
        prop_assert_eq!(&m.counts, &o.counts);
        prop_assert_eq!(m.euler(), 1);
        let table = CountTable::from_mosaic(&cm);
        prop_assert_eq!(m.crossings() as u64, table.get(&[2, 2]));
    }

    #[test]
    fn point_files_round_trip(d in 1usize..=3, s in 0usize..=3, seed in any::<u64>(), periodic in any::<bool>()) {
        let points = if periodic {
            chromosaic::sampling::poisson_torus(20.0, d, seed).unwrap()
        } else {
            grid_instance(12, d, seed).0
        };
        let chi = chromosaic::sampling::random_coloring(points.len(), s, seed, None).unwrap();
        let back = io::parse(&io::to_string(&points, &chi).unwrap()).unwrap();
        prop_assert_eq!(back.points, points);
        prop_assert_eq!(back.coloring, chi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kset_invariants(points in planar(3..=7)) {
        let n = points.len();
        prop_assert_eq!(spherical_ksets(&points, 1).unwrap().count, n);
        prop_assert_eq!(spherical_ksets(&points, n).unwrap().count, 1);
        for k in 1..=n {
            let r = spherical_ksets(&points, k).unwrap();
            prop_assert!(r.count < 2 * k * n);
            prop_assert!(r.symmetric_count >= r.count);
            prop_assert!(r.subsets.windows(2).all(|w| w[0] < w[1]));
            for b in &r.subsets {
                prop_assert!(is_separable(b, &points).unwrap());
            }
        }
    }
}
