mod common;

use common::Setup;
use cutloc_core::geodesic::{fast_marching, CutLocusTruth};

fn fmm_error(s: &Setup) -> f64 {
    let f = fast_marching(&s.mesh, s.source).unwrap();
    f.field.max_abs_diff(&s.distance.field).unwrap()
}

#[test]
fn sphere_subdivision_five_within_two_hundredths() {
    let e = fmm_error(&Setup::sphere(5));
    assert!(e <= 0.02, "sphere fast-marching error {e}");
}

#[test]
fn torus_128_within_five_h() {
    let e = fmm_error(&Setup::torus(128));
    assert!(e <= 5.0 / 128.0, "torus fast-marching error {e}");
}

#[test]
fn errors_decrease_under_refinement() {
    let torus: Vec<f64> = [32, 64, 128].iter().map(|&n| fmm_error(&Setup::torus(n))).collect();
    let sphere: Vec<f64> = [3, 4, 5].iter().map(|&k| fmm_error(&Setup::sphere(k))).collect();
    for errs in [&torus, &sphere] {
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }
}

#[test]
fn fast_marching_is_lipschitz_up_to_5h() {
    for s in [Setup::torus(40), Setup::sphere(3)] {
        let f = fast_marching(&s.mesh, s.source).unwrap();
        let h = s.mesh.max_edge_length();
        for (i, j) in s.mesh.edges() {
            assert!((f.field[i] - f.field[j]).abs() <= s.mesh.edge_length(i, j) + 5.0 * h);
        }
    }
}

#[test]
fn torus_cut_distance_examples() {
    let t = CutLocusTruth::TorusCross {
        center: [0.5, 0.5],
        l1: 1.0,
        l2: 1.0,
    };
    assert_eq!(t.distance_to_uv([0.5, 0.3]), 0.0);
    assert!((t.distance_to_uv([0.25, 0.25]) - 0.25).abs() < 1e-15);
}
