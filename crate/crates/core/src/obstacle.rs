//! Discrete obstacle problem
//!
//! ```text
//!     min  uᵀLu − m Σ mᵢuᵢ    subject to  uᵢ ≤ dᵢ
//! ```
//!
//! solved by projected SOR. The energy has no factor ½, so the gradient is
//! `g = 2Lu − m·mass`: at the minimizer `gᵢ = 0` where the constraint is
//! inactive and `gᵢ ≤ 0` where it is active, the discrete counterpart of
//! `Δu ≥ −m`.

use serde::Serialize;

use crate::fem::{energy_from_lu, FemOperators};
use crate::{Error, Result, ScalarField};

/// Largest problem accepted by [`oracle_solve`].
pub const ORACLE_MAX_VERTICES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Over-relaxation factor, in (0, 2).
    pub omega: f64,
    /// Stop when the largest per-sweep update is at most this...
    pub tol_update: f64,
    /// ...and the scaled KKT residual is at most this.
    pub tol_kkt: f64,
    /// Vertex i is active when `u_i ≥ d_i − tol_act_rel·(1 + |d_i|)`.
    pub tol_act_rel: f64,
    pub max_sweeps: usize,
    /// Evaluate the energy after every sweep and fail on any uphill step.
    pub track_energy: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            omega: 1.5,
            tol_update: 1e-11,
            tol_kkt: 1e-8,
            tol_act_rel: 1e-10,
            max_sweeps: 200_000,
            track_energy: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::Parameter(format!(
                "relaxation factor omega = {} must lie in (0, 2)",
                self.omega
            )));
        }
        for (name, v) in [
            ("tol_update", self.tol_update),
            ("tol_kkt", self.tol_kkt),
            ("tol_act_rel", self.tol_act_rel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} = {v} must be positive")));
            }
        }
        if self.max_sweeps == 0 {
            return Err(Error::Parameter("max_sweeps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ObstacleProblem<'a> {
    ops: &'a FemOperators,
    obstacle: ScalarField,
    m: f64,
}

impl<'a> ObstacleProblem<'a> {
    pub fn new(ops: &'a FemOperators, obstacle: ScalarField, m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Parameter(format!("load m = {m} must be positive")));
        }
        obstacle.ensure_on(ops.mesh_id())?;
        Ok(ObstacleProblem { ops, obstacle, m })
    }

    pub fn ops(&self) -> &'a FemOperators {
        self.ops
    }

    pub fn obstacle(&self) -> &ScalarField {
        &self.obstacle
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Normalization for KKT residuals: `m · max mᵢ`.
    pub fn kkt_scale(&self) -> f64 {
        self.m * self.ops.mass().iter().cloned().fold(0.0, f64::max)
    }

    fn tol_act(&self, i: usize, rel: f64) -> f64 {
        rel * (1.0 + self.obstacle[i].abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    /// max |gᵢ| over inactive vertices.
    pub max_abs_g_inactive: f64,
    /// max gᵢ over active vertices (should be ≤ 0).
    pub max_g_active: f64,
    /// max(uᵢ − dᵢ, 0).
    pub feasibility_violation: f64,
    /// Σ (dᵢ − uᵢ)·max(−gᵢ, 0).
    pub complementarity: f64,
    pub scale: f64,
    pub active_count: usize,
}

impl KktReport {
    /// Stationarity residual in units of `scale`.
    pub fn residual(&self) -> f64 {
        self.max_abs_g_inactive.max(self.max_g_active).max(0.0) / self.scale
    }

    pub fn passes(&self, tol_kkt: f64) -> bool {
        self.residual() <= tol_kkt && self.feasibility_violation <= 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct ObstacleSolution {
    pub u: ScalarField,
    pub active: Vec<bool>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub energy: f64,
    pub last_update: f64,
    pub kkt: KktReport,
    pub energy_history: Option<Vec<f64>>,
}

impl ObstacleSolution {
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

pub fn kkt_report(
    problem: &ObstacleProblem,
    u: &ScalarField,
    config: &SolverConfig,
) -> Result<KktReport> {
    u.ensure_on(problem.ops.mesh_id())?;
    let g = problem.ops.energy_gradient(u.values(), problem.m)?;
    Ok(kkt_from_gradient(problem, u.values(), &g, config.tol_act_rel).0)
}

fn kkt_from_gradient(
    problem: &ObstacleProblem,
    u: &[f64],
    g: &[f64],
    tol_act_rel: f64,
) -> (KktReport, Vec<bool>) {
    let d = problem.obstacle.values();
    let mut rep = KktReport {
        max_abs_g_inactive: 0.0,
        max_g_active: f64::NEG_INFINITY,
        feasibility_violation: 0.0,
        complementarity: 0.0,
        scale: problem.kkt_scale(),
        active_count: 0,
    };
    let mut active = vec![false; u.len()];
    for i in 0..u.len() {
        rep.feasibility_violation = rep.feasibility_violation.max(u[i] - d[i]);
        rep.complementarity += (d[i] - u[i]) * (-g[i]).max(0.0);
        if u[i] >= d[i] - problem.tol_act(i, tol_act_rel) {
            active[i] = true;
            rep.active_count += 1;
            rep.max_g_active = rep.max_g_active.max(g[i]);
        } else {
            rep.max_abs_g_inactive = rep.max_abs_g_inactive.max(g[i].abs());
        }
    }
    (rep, active)
}

pub fn solve(problem: &ObstacleProblem, config: &SolverConfig) -> Result<ObstacleSolution> {
    solve_from(problem, config, problem.obstacle())
}

/// Projected SOR from a given start (clamped below the obstacle first).
/// Vertices are visited in ascending order every sweep.
pub fn solve_from(
    problem: &ObstacleProblem,
    config: &SolverConfig,
    start: &ScalarField,
) -> Result<ObstacleSolution> {
    config.validate()?;
    start.ensure_on(problem.ops.mesh_id())?;
    let ops = problem.ops;
    let l = ops.stiffness();
    let mass = ops.mass();
    let d = problem.obstacle.values();
    let n = ops.dim();
    let (m, omega) = (problem.m, config.omega);

    let diag = l.diagonal();
    if let Some(i) = diag.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Parameter(format!(
            "stiffness diagonal at vertex {i} is not positive; projected SOR needs L_ii > 0"
        )));
    }
    let half_load: Vec<f64> = mass.iter().map(|mi| 0.5 * m * mi).collect();

    let mut u: Vec<f64> = start.values().iter().zip(d).map(|(s, di)| s.min(*di)).collect();
    let mut lu = vec![0.0; n];
    let mut history = config.track_energy.then(Vec::new);
    if let Some(h) = history.as_mut() {
        l.matvec_into(&u, &mut lu)?;
        h.push(energy_from_lu(&u, &lu, mass, m));
    }

    let mut last_update = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    let mut last_check = 0usize;
    for sweep in 1..=config.max_sweeps {
        let mut max_upd = 0.0f64;
        for i in 0..n {
            let (cols, vals) = l.row(i);
            let mut off = 0.0;
            for (&j, &a) in cols.iter().zip(vals) {
                if j != i {
                    off += a * u[j];
                }
            }
            let target = (half_load[i] - off) / diag[i];
            let mut next = u[i] + omega * (target - u[i]);
            if next > d[i] {
                next = d[i];
            }
            max_upd = max_upd.max((next - u[i]).abs());
            u[i] = next;
        }
        last_update = max_upd;

        if let Some(h) = history.as_mut() {
            l.matvec_into(&u, &mut lu)?;
            let e = energy_from_lu(&u, &lu, mass, m);
            let prev = *h.last().unwrap();
            if e > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::Invariant(format!(
                    "energy increased in sweep {sweep}: {prev:e} -> {e:e}"
                )));
            }
            h.push(e);
        }

        if max_upd <= config.tol_update && (last_check == 0 || sweep - last_check >= 10) {
            last_check = sweep;
            l.matvec_into(&u, &mut lu)?;
            let g: Vec<f64> = lu.iter().zip(mass).map(|(a, mi)| 2.0 * a - m * mi).collect();
            let (kkt, active) = kkt_from_gradient(problem, &u, &g, config.tol_act_rel);
            last_residual = kkt.residual();
            if kkt.passes(config.tol_kkt) {
                let energy = energy_from_lu(&u, &lu, mass, m);
                return Ok(ObstacleSolution {
                    u: problem.obstacle.derive(u)?,
                    active,
                    iterations: sweep,
                    kkt_residual: last_residual,
                    energy,
                    last_update,
                    kkt,
                    energy_history: history,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: config.max_sweeps,
        last_update,
        residual: last_residual,
    })
}

/// Independent reference solver: projected gradient descent in the lumped
/// mass metric, `u ← min(d, u − τ M⁻¹g)` with `τ = 1 / (2 λ̄)` where `λ̄`
/// is the Gershgorin bound on the spectrum of `M⁻¹L`. Slow on purpose.
pub fn oracle_solve(problem: &ObstacleProblem, tol: f64) -> Result<ObstacleSolution> {
    const MAX_ITER: usize = 5_000_000;
    let ops = problem.ops;
    let n = ops.dim();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::SizeGuard {
            limit: ORACLE_MAX_VERTICES,
            got: n,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("oracle tolerance must be positive".into()));
    }
    let l = ops.stiffness();
    let mass = ops.mass();
    let d = problem.obstacle.values();
    let m = problem.m;

    let lambda_bound = (0..n)
        .map(|i| l.row(i).1.iter().map(|v| v.abs()).sum::<f64>() / mass[i])
        .fold(0.0, f64::max);
    let step = 1.0 / (2.0 * lambda_bound);

    let mut u = d.to_vec();
    let mut lu = vec![0.0; n];
    let mut last = f64::INFINITY;
    for it in 1..=MAX_ITER {
        l.matvec_into(&u, &mut lu)?;
        let mut max_upd = 0.0f64;
        for i in 0..n {
            let grad = 2.0 * lu[i] / mass[i] - m;
            let next = (u[i] - step * grad).min(d[i]);
            max_upd = max_upd.max((next - u[i]).abs());
            u[i] = next;
        }
        last = max_upd;
        if max_upd <= tol {
            l.matvec_into(&u, &mut lu)?;
            let g: Vec<f64> = lu.iter().zip(mass).map(|(a, mi)| 2.0 * a - m * mi).collect();
            let (kkt, active) =
                kkt_from_gradient(problem, &u, &g, SolverConfig::default().tol_act_rel);
            return Ok(ObstacleSolution {
                energy: energy_from_lu(&u, &lu, mass, m),
                u: problem.obstacle.derive(u)?,
                active,
                iterations: it,
                kkt_residual: kkt.residual(),
                last_update: max_upd,
                kkt,
                energy_history: None,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        last_update: last,
        residual: f64::NAN,
    })
}
