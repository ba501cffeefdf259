mod common;

use common::{Setup, SOUTH};
use cutloc_core::cutlocus::{default_theta, detect};
use cutloc_core::obstacle::SolverConfig;
use proptest::prelude::*;

#[test]
fn torus_64_full_coverage_with_self_calibrated_theta() {
    let s = Setup::torus(64);
    let sol = s.solve(1.0, &SolverConfig::default());
    let first = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), default_theta(1e-8)).unwrap();
    let gap = first.min_gap_on_cut.unwrap();
    assert!(gap > 0.0);
    let rep = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), 0.5 * gap).unwrap();
    assert_eq!(rep.coverage, Some(1.0));
    assert!(rep.passed);
}

#[test]
fn sphere_antipode_flagged_and_pole_ring_not() {
    let s = Setup::sphere(4);
    let sol = s.solve(1.0, &SolverConfig::default());
    let rep = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), default_theta(1e-8)).unwrap();
    assert!(rep.noncontact[SOUTH]);
    let ring = &s.mesh.vertex_neighbors()[0];
    assert!(!rep.noncontact[0] && ring.iter().all(|&j| !rep.noncontact[j]));
}

#[test]
fn generic_mesh_has_no_coverage_score() {
    let s = Setup::sphere(2);
    let sol = s.solve(1.0, &SolverConfig::default());
    let rep = detect(&s.mesh, &sol, &s.distance, None, 1e-6).unwrap();
    assert_eq!(rep.coverage, None);
    assert!(rep.flagged_count > 0);
    assert!(detect(&s.mesh, &sol, &s.distance, None, 0.0).is_err());
}

#[test]
fn source_ring_in_contact_on_test_surfaces() {
    for s in [Setup::torus(64), Setup::sphere(4)] {
        for m in [0.5, 1.0] {
            let sol = s.solve(m, &SolverConfig::default());
            let rep = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), default_theta(1e-8)).unwrap();
            let ring = &s.mesh.vertex_neighbors()[0];
            assert!(!rep.noncontact[0] && ring.iter().all(|&j| !rep.noncontact[j]), "m = {m}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn raising_theta_never_grows_flagged_set(t1 in 1e-7f64..0.5, t2 in 1e-7f64..0.5, n in 8usize..24, mi in 0usize..2) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let s = Setup::torus(n);
        let sol = s.solve([0.5, 1.0][mi], &SolverConfig::default());
        let a = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), lo).unwrap();
        let b = detect(&s.mesh, &sol, &s.distance, Some(&s.truth), hi).unwrap();
        prop_assert!(b.noncontact.iter().zip(&a.noncontact).all(|(hb, la)| !hb || *la));
    }
}
