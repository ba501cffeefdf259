//! Non-contact set `{d − u > θ}` and its coverage of the analytic cut locus.

use serde::Serialize;

use crate::geodesic::{CutLocusTruth, DistanceField};
use crate::obstacle::ObstacleSolution;
use crate::{Error, Mesh, Result};

/// `max(10 · tol_kkt, 1e-6)`.
pub fn default_theta(tol_kkt: f64) -> f64 {
    (10.0 * tol_kkt).max(1e-6)
}

#[derive(Debug, Clone, Serialize)]
pub struct CutLocusReport {
    #[serde(skip)]
    pub noncontact: Vec<bool>,
    pub theta: f64,
    pub flagged_count: usize,
    /// Tolerance used to select vertices near the cut locus (max edge length).
    pub h: f64,
    pub near_cut_count: usize,
    /// Fraction of near-cut vertices flagged non-contact; `None` without ground truth.
    pub coverage: Option<f64>,
    /// Largest distance to the cut locus over flagged vertices.
    pub excess_radius: Option<f64>,
    /// Smallest gap `d − u` over near-cut vertices.
    pub min_gap_on_cut: Option<f64>,
    pub passed: bool,
}

pub fn detect(
    mesh: &Mesh,
    solution: &ObstacleSolution,
    distance: &DistanceField,
    truth: Option<&CutLocusTruth>,
    theta: f64,
) -> Result<CutLocusReport> {
    if !(theta > 0.0) {
        return Err(Error::Parameter(format!("gap threshold theta = {theta} must be positive")));
    }
    solution.u.ensure_on(mesh.id())?;
    distance.field.ensure_on(mesh.id())?;
    let u = solution.u.values();
    let d = distance.values();
    let noncontact: Vec<bool> = d.iter().zip(u).map(|(d, u)| d - u > theta).collect();
    let flagged_count = noncontact.iter().filter(|&&f| f).count();
    let h = mesh.max_edge_length();

    let Some(truth) = truth else {
        return Ok(CutLocusReport {
            noncontact,
            theta,
            flagged_count,
            h,
            near_cut_count: 0,
            coverage: None,
            excess_radius: None,
            min_gap_on_cut: None,
            passed: true,
        });
    };

    let dist_to_cut = truth.distances(mesh);
    let mut near = 0usize;
    let mut covered = 0usize;
    let mut min_gap = f64::INFINITY;
    let mut excess = 0.0f64;
    for i in 0..mesh.num_vertices() {
        if noncontact[i] {
            excess = excess.max(dist_to_cut[i]);
        }
        if dist_to_cut[i] <= h {
            near += 1;
            covered += noncontact[i] as usize;
            min_gap = min_gap.min(d[i] - u[i]);
        }
    }
    if near == 0 {
        return Err(Error::Invariant("no vertex lies within h of the cut locus".into()));
    }
    let coverage = covered as f64 / near as f64;
    Ok(CutLocusReport {
        noncontact,
        theta,
        flagged_count,
        h,
        near_cut_count: near,
        coverage: Some(coverage),
        excess_radius: Some(excess),
        min_gap_on_cut: Some(min_gap),
        passed: min_gap > 0.0 && coverage == 1.0,
    })
}
