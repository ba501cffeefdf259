mod common;

use common::{Setup, SOUTH};
use cutloc_core::obstacle::SolverConfig;
use cutloc_core::smoothing::{
    blend, build_smoothed, check_invariants, choose_epsilon, mollify, obstacle_discrepancy, umbrella,
    verify_equivalence, DEFAULT_PASSES,
};
use cutloc_core::ScalarField;
use proptest::prelude::*;

/// Regression baseline from the 64×64 unit-torus solve with default settings.
const TORUS_64_EPSILON: f64 = 0.146_569_831;

#[test]
fn torus_64_equivalence_and_negative_control() {
    let s = Setup::torus(64);
    let cfg = SolverConfig::default();
    let sol = s.solve(1.0, &cfg);
    let eps = choose_epsilon(&s.mesh, &sol, &s.distance, Some(&s.truth)).unwrap();
    assert!((eps - TORUS_64_EPSILON).abs() <= 1e-6, "epsilon {eps}");

    let sm = build_smoothed(&s.mesh, &s.ops, &sol, &s.distance, Some(&s.truth), DEFAULT_PASSES).unwrap();
    assert!(check_invariants(&sm, &sol, &s.distance).unwrap().all());
    assert!(sm.metrics.mollify_deviation <= 0.49 * sm.epsilon);

    let p = s.problem(1.0);
    assert!(verify_equivalence(&p, &sm, &cfg).unwrap() <= 1e-6);
    let broken = s.distance.field.derive(s.distance.values().iter().map(|d| d - eps).collect()).unwrap();
    assert!(obstacle_discrepancy(&p, &broken, &sol, &cfg).unwrap() > 1e-3);
}

#[test]
fn torus_64_mollification_flattens_the_crease() {
    let s = Setup::torus(64);
    let sol = s.solve(1.0, &SolverConfig::default());
    let eps = choose_epsilon(&s.mesh, &sol, &s.distance, Some(&s.truth)).unwrap();
    let mol = mollify(&s.mesh, &s.ops, &s.distance, eps, DEFAULT_PASSES).unwrap();
    let target_dev = mol
        .values()
        .iter()
        .zip(s.distance.values())
        .map(|(m, d)| (m - (d - 0.5 * eps)).abs())
        .fold(0.0, f64::max);
    assert!(target_dev <= 0.49 * eps);
    let h = s.mesh.max_edge_length();
    let near: Vec<usize> = (0..s.mesh.num_vertices()).filter(|&i| s.truth.distance_at(&s.mesh, i) <= h).collect();
    let before = umbrella(&s.mesh, s.distance.values());
    let after = umbrella(&s.mesh, mol.values());
    let worst = |u: &[f64]| near.iter().map(|&i| u[i]).fold(0.0, f64::max);
    assert!(worst(&after) < worst(&before));
}

#[test]
fn sphere_4_equivalence() {
    let s = Setup::sphere(4);
    let cfg = SolverConfig::default();
    let sol = s.solve(1.0, &cfg);
    let eps = choose_epsilon(&s.mesh, &sol, &s.distance, Some(&s.truth)).unwrap();
    // the antipode's own gap bounds ε from above; its one-ring also lies within h
    let gap = |i: usize| s.distance.values()[i] - sol.u[i];
    assert!(eps <= 0.5 * gap(SOUTH));
    let ring_min = s.mesh.vertex_neighbors()[SOUTH].iter().map(|&j| gap(j)).fold(gap(SOUTH), f64::min);
    assert_eq!(eps, 0.5 * ring_min);

    let sm = build_smoothed(&s.mesh, &s.ops, &sol, &s.distance, Some(&s.truth), DEFAULT_PASSES).unwrap();
    assert!(sm.field[SOUTH] < s.distance.values()[SOUTH]);
    let p = s.problem(1.0);
    assert!(verify_equivalence(&p, &sm, &cfg).unwrap() <= 1e-6);
    let broken = s.distance.field.derive(s.distance.values().iter().map(|d| d - eps).collect()).unwrap();
    assert!(obstacle_discrepancy(&p, &broken, &sol, &cfg).unwrap() > 1e-3);
}

#[test]
fn generic_mesh_uses_noncontact_core() {
    let s = Setup::sphere(3);
    let cfg = SolverConfig::default();
    let sol = s.solve(1.0, &cfg);
    let sm = build_smoothed(&s.mesh, &s.ops, &sol, &s.distance, None, DEFAULT_PASSES).unwrap();
    assert!(sm.metrics.cut_vertex_count > 0);
    assert!(sm.field[SOUTH] < s.distance.values()[SOUTH]);
    assert!(verify_equivalence(&s.problem(1.0), &sm, &cfg).unwrap() <= 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blend_stays_between_inputs(seed in any::<u64>(), n in 4usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mesh = cutloc_core::mesh::make_flat_torus(1.0, 1.0, n, n).unwrap();
        let mut draw = |lo: f64, hi: f64| ScalarField::from_fn(&mesh, |_| rng.gen_range(lo..hi)).unwrap();
        let d = draw(-2.0, 2.0);
        let m = draw(-2.0, 2.0);
        let r = draw(0.0, 1.0);
        let f = blend(&d, &m, &r).unwrap();
        for i in 0..mesh.num_vertices() {
            prop_assert!(d[i].min(m[i]) - 1e-12 <= f[i] && f[i] <= d[i].max(m[i]) + 1e-12);
        }
    }

    #[test]
    fn mollify_bound_is_strict(n in 6usize..24, eps in 1e-4f64..0.3, passes in 0usize..40) {
        let s = Setup::torus(n);
        let mol = mollify(&s.mesh, &s.ops, &s.distance, eps, passes).unwrap();
        for (m, d) in mol.values().iter().zip(s.distance.values()) {
            prop_assert!((m - (d - 0.5 * eps)).abs() <= 0.49 * eps);
        }
    }
}
