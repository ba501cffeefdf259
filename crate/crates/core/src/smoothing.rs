//! Smoothed obstacle `d̃ = (1 − ρ) d + ρ d_ε` that lies strictly below `d` on
//! the cut locus yet leaves the obstacle solution unchanged.
//!
//! `d_ε` is `d − ε/2` averaged over one-rings and clamped back to within
//! `0.49 ε` of its target, so `d − 0.99 ε ≤ d_ε ≤ d − 0.01 ε`. The bump `ρ` is
//! supported where `d − u > ε`, hence `d̃ > u` on its support and the contact
//! set (where `d̃ = d`) is untouched.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::fem::FemOperators;
use crate::geodesic::{CutLocusTruth, DistanceField};
use crate::obstacle::{solve, ObstacleProblem, ObstacleSolution, SolverConfig};
use crate::{Error, Mesh, Result, ScalarField};

pub const DEFAULT_PASSES: usize = 20;
/// Mollified field stays within this multiple of ε from `d − ε/2`.
pub const MOLLIFY_SLACK: f64 = 0.49;

#[derive(Debug, Clone)]
pub struct SmoothedObstacle {
    pub field: ScalarField,
    pub epsilon: f64,
    pub rho: ScalarField,
    pub mollified: ScalarField,
    /// `d̃ = d` on every vertex with `d ≤ near_b_radius`.
    pub near_b_radius: f64,
    pub metrics: SmoothingMetrics,
    /// Vertices where `d̃ < d` and `ρ = 1` are required.
    pub cut_vertices: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingMetrics {
    pub epsilon: f64,
    pub passes: usize,
    pub near_b_radius: f64,
    /// Width of the `ρ = 1` plateau around the cut locus.
    pub plateau: f64,
    /// Radius at which `ρ` reaches zero.
    pub sigma: f64,
    /// `max |d_ε − (d − ε/2)|`.
    pub mollify_deviation: f64,
    pub cut_vertex_count: usize,
    pub support_count: usize,
    pub crease: CreaseMetrics,
}

/// Umbrella second differences `|mean_{j~i} f_j − f_i|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CreaseMetrics {
    /// Max over cut vertices, for the raw distance.
    pub distance_near_cut: f64,
    /// Max over cut vertices, for the smoothed obstacle.
    pub smoothed_near_cut: f64,
    /// Median of the smoothed obstacle away from the cut locus and from `b`.
    pub smoothed_median_away: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantReport {
    pub between_u_and_d: bool,
    pub equal_near_b: bool,
    pub strictly_below_on_cut: bool,
    pub rho_in_unit_interval: bool,
    pub rho_one_on_cut: bool,
    pub rho_zero_outside_support: bool,
    pub blend_bounds: bool,
    pub mollify_bound: bool,
}

impl InvariantReport {
    pub fn all(&self) -> bool {
        self.between_u_and_d
            && self.equal_near_b
            && self.strictly_below_on_cut
            && self.rho_in_unit_interval
            && self.rho_one_on_cut
            && self.rho_zero_outside_support
            && self.blend_bounds
            && self.mollify_bound
    }
}

/// `ε = ½ min (d − u)` over vertices within `h` of the cut locus. Without
/// ground truth, `ε = ¼ max (d − u)`, so the core `{d − u > 2ε}` is non-empty.
pub fn choose_epsilon(
    mesh: &Mesh,
    solution: &ObstacleSolution,
    distance: &DistanceField,
    truth: Option<&CutLocusTruth>,
) -> Result<f64> {
    solution.u.ensure_on(mesh.id())?;
    distance.field.ensure_on(mesh.id())?;
    let gap: Vec<f64> = distance
        .values()
        .iter()
        .zip(solution.u.values())
        .map(|(d, u)| d - u)
        .collect();
    let eps = match truth {
        Some(truth) => {
            let h = mesh.max_edge_length();
            let min_gap = truth
                .distances(mesh)
                .iter()
                .zip(&gap)
                .filter(|(s, _)| **s <= h)
                .map(|(_, g)| *g)
                .fold(f64::INFINITY, f64::min);
            if !min_gap.is_finite() {
                return Err(Error::Invariant("no vertex lies within h of the cut locus".into()));
            }
            0.5 * min_gap
        }
        None => 0.25 * gap.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    };
    if !(eps > 0.0) {
        return Err(Error::InclusionFailure(2.0 * eps));
    }
    Ok(eps)
}

/// `d − ε/2` smoothed by `passes` rounds of mass-weighted one-ring averaging,
/// then clamped to within `0.49 ε` of `d − ε/2`.
pub fn mollify(
    mesh: &Mesh,
    ops: &FemOperators,
    distance: &DistanceField,
    epsilon: f64,
    passes: usize,
) -> Result<ScalarField> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must be positive")));
    }
    distance.field.ensure_on(mesh.id())?;
    if ops.mesh_id() != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    let target: Vec<f64> = distance.values().iter().map(|d| d - 0.5 * epsilon).collect();
    let nbrs = mesh.vertex_neighbors();
    let mass = ops.mass();
    let mut cur = target.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..passes {
        for (i, ring) in nbrs.iter().enumerate() {
            let mut num = mass[i] * cur[i];
            let mut den = mass[i];
            for &j in ring {
                num += mass[j] * cur[j];
                den += mass[j];
            }
            next[i] = num / den;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    for (c, t) in cur.iter_mut().zip(&target) {
        // keep a few ulps of headroom so the bound survives re-evaluation
        let band = MOLLIFY_SLACK * epsilon - 4.0 * f64::EPSILON * (t.abs() + epsilon);
        *c = c.clamp(t - band, t + band);
    }
    distance.field.derive(cur)
}

/// Cubic ramp with a plateau: 1 for `s ≤ plateau`, 0 for `s ≥ sigma`.
pub fn bump(s: f64, plateau: f64, sigma: f64) -> f64 {
    if s <= plateau {
        return 1.0;
    }
    if s >= sigma {
        return 0.0;
    }
    let t = (s - plateau) / (sigma - plateau);
    (1.0 - t * t * (3.0 - 2.0 * t)).clamp(0.0, 1.0)
}

/// `(1 − ρ) d + ρ d_ε`.
pub fn blend(distance: &ScalarField, mollified: &ScalarField, rho: &ScalarField) -> Result<ScalarField> {
    mollified.ensure_on(distance.mesh_id())?;
    rho.ensure_on(distance.mesh_id())?;
    let out = distance
        .values()
        .iter()
        .zip(mollified.values())
        .zip(rho.values())
        .map(|((d, m), r)| if *r == 0.0 { *d } else { (1.0 - r) * d + r * m })
        .collect();
    distance.derive(out)
}

pub fn build_smoothed(
    mesh: &Mesh,
    ops: &FemOperators,
    solution: &ObstacleSolution,
    distance: &DistanceField,
    truth: Option<&CutLocusTruth>,
    passes: usize,
) -> Result<SmoothedObstacle> {
    let epsilon = choose_epsilon(mesh, solution, distance, truth)?;
    let d = distance.values();
    let u = solution.u.values();
    let n = mesh.num_vertices();
    let h = mesh.max_edge_length();

    // s: distance to the cut locus, or to the non-contact core without ground truth.
    let s = match truth {
        Some(t) => t.distances(mesh),
        None => {
            let core: Vec<usize> = (0..n).filter(|&i| d[i] - u[i] > 2.0 * epsilon).collect();
            graph_distance(mesh, &core)
        }
    };
    let plateau = h;
    let cut_vertices: Vec<bool> = s.iter().map(|&s| s <= plateau).collect();
    let near_b_radius = 0.5
        * (0..n)
            .filter(|&i| cut_vertices[i])
            .map(|i| d[i])
            .fold(f64::INFINITY, f64::min);

    let forbidden = |i: usize| d[i] - u[i] <= epsilon || d[i] <= near_b_radius;
    let sigma = (0..n).filter(|&i| forbidden(i)).map(|i| s[i]).fold(f64::INFINITY, f64::min);
    if !(sigma > plateau) {
        let conflicts: Vec<usize> = (0..n).filter(|&i| forbidden(i) && s[i] <= plateau).collect();
        return Err(Error::Construction(format!(
            "no admissible bump radius: vertices {conflicts:?} are near the cut locus but outside the support region"
        )));
    }
    // On a surface with no forbidden vertex at all the ramp still needs a finite end.
    let sigma = if sigma.is_finite() { sigma } else { plateau + 1.0 };

    let mollified = mollify(mesh, ops, distance, epsilon, passes)?;
    let rho = distance.field.derive(s.iter().map(|&s| bump(s, plateau, sigma)).collect())?;
    let field = blend(&distance.field, &mollified, &rho)?;

    let target_dev = d
        .iter()
        .zip(mollified.values())
        .map(|(d, m)| (m - (d - 0.5 * epsilon)).abs())
        .fold(0.0, f64::max);
    let crease = crease_metrics(mesh, d, field.values(), &s, &cut_vertices, h, near_b_radius);
    let metrics = SmoothingMetrics {
        epsilon,
        passes,
        near_b_radius,
        plateau,
        sigma,
        mollify_deviation: target_dev,
        cut_vertex_count: cut_vertices.iter().filter(|&&c| c).count(),
        support_count: rho.values().iter().filter(|&&r| r > 0.0).count(),
        crease,
    };
    let smoothed = SmoothedObstacle {
        field,
        epsilon,
        rho,
        mollified,
        near_b_radius,
        metrics,
        cut_vertices,
    };
    let report = check_invariants(&smoothed, solution, distance)?;
    if !report.all() {
        return Err(Error::Invariant(format!("smoothed obstacle invariants failed: {report:?}")));
    }
    Ok(smoothed)
}

pub fn check_invariants(
    smoothed: &SmoothedObstacle,
    solution: &ObstacleSolution,
    distance: &DistanceField,
) -> Result<InvariantReport> {
    let id = distance.field.mesh_id();
    smoothed.field.ensure_on(id)?;
    solution.u.ensure_on(id)?;
    let d = distance.values();
    let u = solution.u.values();
    let f = smoothed.field.values();
    let rho = smoothed.rho.values();
    let mol = smoothed.mollified.values();
    let eps = smoothed.epsilon;
    let mut r = InvariantReport {
        between_u_and_d: true,
        equal_near_b: true,
        strictly_below_on_cut: true,
        rho_in_unit_interval: true,
        rho_one_on_cut: true,
        rho_zero_outside_support: true,
        blend_bounds: true,
        mollify_bound: smoothed.metrics.mollify_deviation <= MOLLIFY_SLACK * eps,
    };
    for i in 0..d.len() {
        r.between_u_and_d &= u[i] - 1e-9 <= f[i] && f[i] <= d[i] + 1e-12;
        if d[i] <= smoothed.near_b_radius {
            r.equal_near_b &= f[i] == d[i];
        }
        if smoothed.cut_vertices[i] {
            r.strictly_below_on_cut &= f[i] < d[i];
            r.rho_one_on_cut &= rho[i] == 1.0;
        }
        r.rho_in_unit_interval &= (0.0..=1.0).contains(&rho[i]);
        if d[i] - u[i] <= eps || d[i] <= smoothed.near_b_radius {
            r.rho_zero_outside_support &= rho[i] == 0.0;
        }
        r.blend_bounds &= d[i].min(mol[i]) - 1e-12 <= f[i] && f[i] <= d[i].max(mol[i]) + 1e-12;
    }
    Ok(r)
}

/// Solves the obstacle problem with the original and the smoothed obstacle and
/// returns the max-norm difference of the two minimizers.
pub fn verify_equivalence(
    original: &ObstacleProblem,
    smoothed: &SmoothedObstacle,
    config: &SolverConfig,
) -> Result<f64> {
    let base = solve(original, config)?;
    obstacle_discrepancy(original, &smoothed.field, &base, config)
}

/// `‖u(obstacle) − reference‖∞` for the same operators and load.
pub fn obstacle_discrepancy(
    original: &ObstacleProblem,
    obstacle: &ScalarField,
    reference: &ObstacleSolution,
    config: &SolverConfig,
) -> Result<f64> {
    let problem = ObstacleProblem::new(original.ops(), obstacle.clone(), original.m())?;
    let sol = solve(&problem, config)?;
    sol.u.max_abs_diff(&reference.u)
}

pub fn umbrella(mesh: &Mesh, f: &[f64]) -> Vec<f64> {
    mesh.vertex_neighbors()
        .iter()
        .enumerate()
        .map(|(i, ring)| {
            let mean = ring.iter().map(|&j| f[j]).sum::<f64>() / ring.len() as f64;
            (mean - f[i]).abs()
        })
        .collect()
}

fn crease_metrics(
    mesh: &Mesh,
    d: &[f64],
    smoothed: &[f64],
    s: &[f64],
    cut: &[bool],
    h: f64,
    near_b_radius: f64,
) -> CreaseMetrics {
    let ud = umbrella(mesh, d);
    let us = umbrella(mesh, smoothed);
    let max_on = |v: &[f64]| {
        (0..v.len())
            .filter(|&i| cut[i])
            .map(|i| v[i])
            .fold(0.0, f64::max)
    };
    let mut away: Vec<f64> = (0..us.len())
        .filter(|&i| s[i] > 4.0 * h && d[i] > near_b_radius)
        .map(|i| us[i])
        .collect();
    away.sort_by(f64::total_cmp);
    let median = if away.is_empty() { f64::NAN } else { away[away.len() / 2] };
    let smoothed_near_cut = max_on(&us);
    CreaseMetrics {
        distance_near_cut: max_on(&ud),
        smoothed_near_cut,
        smoothed_median_away: median,
        within_bound: smoothed_near_cut <= 3.0 * median,
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge-path distance from a vertex set; infinite everywhere if the set is empty.
fn graph_distance(mesh: &Mesh, sources: &[usize]) -> Vec<f64> {
    let nbrs = mesh.vertex_neighbors();
    let mut dist = vec![f64::INFINITY; mesh.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(ds, i)) = heap.pop() {
        if ds > dist[i] {
            continue;
        }
        for &j in &nbrs[i] {
            let nd = ds + mesh.edge_length(i, j);
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Entry(nd, j));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::geodesic::{analytic_cut_locus, analytic_distance};
    use crate::mesh::make_flat_torus;
    use crate::SourcePoint;

    fn fake_solution(u: ScalarField) -> ObstacleSolution {
        let n = u.len();
        ObstacleSolution {
            u,
            active: vec![false; n],
            iterations: 0,
            kkt_residual: 0.0,
            energy: 0.0,
            last_update: 0.0,
            kkt: crate::obstacle::KktReport {
                max_abs_g_inactive: 0.0,
                max_g_active: 0.0,
                feasibility_violation: 0.0,
                complementarity: 0.0,
                scale: 1.0,
                active_count: 0,
            },
            energy_history: None,
        }
    }

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0, 0.1, 1.0), 1.0);
        assert_eq!(bump(0.1, 0.1, 1.0), 1.0);
        assert_eq!(bump(1.0, 0.1, 1.0), 0.0);
        assert_eq!(bump(5.0, 0.1, 1.0), 0.0);
        assert!((bump(0.55, 0.1, 1.0) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let b = bump(k as f64 / 100.0, 0.1, 1.0);
            assert!(b <= prev && (0.0..=1.0).contains(&b));
            prev = b;
        }
    }

    #[test]
    fn mollify_trivial_cases() {
        let mesh = make_flat_torus(1.0, 1.0, 10, 10).unwrap();
        let ops = assemble(&mesh).unwrap();
        let b = SourcePoint::new(&mesh, 0).unwrap();
        let dist = analytic_distance(&mesh, b).unwrap();
        let m0 = mollify(&mesh, &ops, &dist, 0.2, 0).unwrap();
        for (m, d) in m0.values().iter().zip(dist.values()) {
            assert_eq!(*m, d - 0.1);
        }
        let mut flat = dist.clone();
        flat.field = ScalarField::constant(&mesh, 0.7).unwrap();
        let m5 = mollify(&mesh, &ops, &flat, 0.2, 5).unwrap();
        assert!(m5.values().iter().all(|v| (v - 0.6).abs() < 1e-15));
        assert!(mollify(&mesh, &ops, &dist, 0.0, 3).is_err());
    }

    #[test]
    fn blend_identities() {
        let mesh = make_flat_torus(1.0, 1.0, 6, 6).unwrap();
        let d = ScalarField::from_fn(&mesh, |i| i as f64 * 0.1).unwrap();
        let m = ScalarField::from_fn(&mesh, |i| i as f64 * 0.1 - 0.05).unwrap();
        let zero = ScalarField::constant(&mesh, 0.0).unwrap();
        let one = ScalarField::constant(&mesh, 1.0).unwrap();
        assert_eq!(blend(&d, &m, &zero).unwrap().values(), d.values());
        assert_eq!(blend(&d, &m, &one).unwrap().values(), m.values());
    }

    #[test]
    fn artificial_contact_everywhere_fails_inclusion() {
        let mesh = make_flat_torus(1.0, 1.0, 16, 16).unwrap();
        let b = SourcePoint::new(&mesh, 0).unwrap();
        let dist = analytic_distance(&mesh, b).unwrap();
        let truth = analytic_cut_locus(&mesh, b).unwrap();
        let sol = fake_solution(dist.field.clone());
        assert!(matches!(
            choose_epsilon(&mesh, &sol, &dist, Some(&truth)),
            Err(Error::InclusionFailure(_))
        ));
    }

    #[test]
    fn graph_distance_on_grid() {
        let mesh = make_flat_torus(1.0, 1.0, 8, 8).unwrap();
        let g = graph_distance(&mesh, &[0]);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 0.125).abs() < 1e-15);
        assert!(graph_distance(&mesh, &[]).iter().all(|v| v.is_infinite()));
    }
}
