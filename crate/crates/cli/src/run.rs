use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use cutloc_core::barrier::{
    blowup_probe, build_barrier_with, sphere_radial_check, BarrierCertificate, BarrierOptions,
    BlowupTable, RadialCheck,
};
use cutloc_core::cutlocus::{default_theta, detect, CutLocusReport};
use cutloc_core::fem::{assemble, FemOperators};
use cutloc_core::geodesic::{
    analytic_cut_locus, analytic_distance, fast_marching, CutLocusTruth, DistanceField,
    DistanceMethod,
};
use cutloc_core::mesh::{load_mesh, make_flat_torus, make_icosphere, MeshFormat};
use cutloc_core::obstacle::{solve, KktReport, ObstacleProblem, ObstacleSolution};
use cutloc_core::smoothing::{
    build_smoothed, check_invariants, verify_equivalence, InvariantReport, SmoothingMetrics,
};
use cutloc_core::{Mesh, SourcePoint, SurfaceTag};
use serde::Serialize;

use crate::config::{DistanceChoice, RunConfig, SurfaceSpec};
use crate::export::write_field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Solve the obstacle problem and export u and the obstacle.
    Solve,
    /// Solve, then flag the non-contact set and score it against the cut locus.
    Detect,
    /// Certify upper barriers with Laplacian ≤ −A at cut points (flat torus).
    Barrier,
    /// Discrete Laplacian of the distance near the cut locus under refinement.
    Blowup,
    /// Build the smoothed obstacle and check that the solution is unchanged.
    Smooth,
    /// Every step that applies to the configured surface.
    All,
}

#[derive(Debug, Serialize)]
pub struct SurfaceSummary {
    pub spec: String,
    pub tag: SurfaceTag,
    pub vertices: usize,
    pub triangles: usize,
    pub h: f64,
    pub distance_method: DistanceMethod,
}

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub m: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub last_update: f64,
    pub energy: f64,
    pub active_count: usize,
    pub kkt: KktReport,
}

#[derive(Debug, Serialize)]
pub struct BlowupSummary {
    pub table: BlowupTable,
    /// Grid spacings (torus) used for the `−1/(4h)` comparison.
    pub grid_h: Vec<f64>,
    pub radial: Vec<RadialCheck>,
}

#[derive(Debug, Serialize)]
pub struct SmoothingSummary {
    pub metrics: SmoothingMetrics,
    pub invariants: InvariantReport,
    pub equivalence_discrepancy: f64,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Command,
    pub config: RunConfig,
    pub surface: Option<SurfaceSummary>,
    pub solve: Option<SolveSummary>,
    pub cut_locus: Option<CutLocusReport>,
    pub barrier: Option<Vec<BarrierCertificate>>,
    pub blowup: Option<BlowupSummary>,
    pub smoothing: Option<SmoothingSummary>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub error: Option<String>,
    pub passed: bool,
    /// Wall-clock seconds per stage; the only non-reproducible part of the report.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }
}

struct Surface {
    mesh: Mesh,
    source: SourcePoint,
    ops: FemOperators,
    distance: DistanceField,
    truth: Option<CutLocusTruth>,
}

fn build_mesh(spec: &SurfaceSpec) -> Result<Mesh> {
    Ok(match spec {
        SurfaceSpec::Torus { l1, l2, n1, n2 } => make_flat_torus(*l1, *l2, *n1, *n2)?,
        SurfaceSpec::Sphere { subdivisions } => make_icosphere(*subdivisions)?,
        SurfaceSpec::File { path } => {
            let fmt = MeshFormat::from_path(path)
                .ok_or_else(|| anyhow!("cannot infer mesh format of {} (use .off or .obj)", path.display()))?;
            load_mesh(path, fmt).with_context(|| format!("loading {}", path.display()))?
        }
    })
}

fn timed<T>(report: &mut Report, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f();
    report.timings.insert(stage.to_string(), t.elapsed().as_secs_f64());
    out
}

fn prepare(cfg: &RunConfig, report: &mut Report) -> Result<Surface> {
    timed(report, "setup", || {
        let mesh = build_mesh(&cfg.surface)?;
        let source = SourcePoint::new(&mesh, cfg.source)?;
        let ops = assemble(&mesh)?;
        let analytic = mesh.tag() != SurfaceTag::Generic;
        let distance = match cfg.distance {
            DistanceChoice::Analytic => analytic_distance(&mesh, source)?,
            DistanceChoice::FastMarching => fast_marching(&mesh, source)?,
            DistanceChoice::Auto if analytic => analytic_distance(&mesh, source)?,
            DistanceChoice::Auto => fast_marching(&mesh, source)?,
        };
        let truth = analytic.then(|| analytic_cut_locus(&mesh, source)).transpose()?;
        Ok(Surface {
            mesh,
            source,
            ops,
            distance,
            truth,
        })
    })
    .inspect(|ctx| {
        report.surface = Some(SurfaceSummary {
            spec: cfg.surface.to_string(),
            tag: ctx.mesh.tag(),
            vertices: ctx.mesh.num_vertices(),
            triangles: ctx.mesh.num_triangles(),
            h: ctx.mesh.max_edge_length(),
            distance_method: ctx.distance.method,
        });
    })
}

fn run_solve(ctx: &Surface, cfg: &RunConfig, out: &Path, report: &mut Report) -> Result<ObstacleSolution> {
    let problem = ObstacleProblem::new(&ctx.ops, ctx.distance.field.clone(), cfg.m)?;
    let sol = timed(report, "solve", || Ok(solve(&problem, &cfg.solver)?))?;
    report.check("solve: KKT residual within tol_kkt", sol.kkt.passes(cfg.solver.tol_kkt));
    report.check(
        "solve: feasibility u <= d",
        sol.u.values().iter().zip(ctx.distance.values()).all(|(u, d)| u <= d),
    );
    report.solve = Some(SolveSummary {
        m: cfg.m,
        iterations: sol.iterations,
        kkt_residual: sol.kkt_residual,
        last_update: sol.last_update,
        energy: sol.energy,
        active_count: sol.active_count(),
        kkt: sol.kkt,
    });
    report.artifacts.extend(write_field(out, &ctx.mesh, "u", sol.u.values())?);
    report.artifacts.extend(write_field(out, &ctx.mesh, "distance", ctx.distance.values())?);
    Ok(sol)
}

fn run_detect(ctx: &Surface, cfg: &RunConfig, sol: &ObstacleSolution, out: &Path, report: &mut Report) -> Result<()> {
    let theta = cfg.theta.unwrap_or_else(|| default_theta(cfg.solver.tol_kkt));
    let rep = timed(report, "detect", || {
        Ok(detect(&ctx.mesh, sol, &ctx.distance, ctx.truth.as_ref(), theta)?)
    })?;
    report.check("detect: cut locus inside the non-contact set", rep.passed);
    let flags: Vec<f64> = rep.noncontact.iter().map(|&f| f as u8 as f64).collect();
    report.artifacts.extend(write_field(out, &ctx.mesh, "noncontact", &flags)?);
    let gap: Vec<f64> = ctx.distance.values().iter().zip(sol.u.values()).map(|(d, u)| d - u).collect();
    report.artifacts.extend(write_field(out, &ctx.mesh, "gap", &gap)?);
    report.cut_locus = Some(rep);
    Ok(())
}

fn run_barrier(ctx: &Surface, cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let opts = BarrierOptions {
        radius: cfg.barrier_radius,
        samples: cfg.barrier_samples,
    };
    let certs = timed(report, "barrier", || {
        let mut certs = Vec::new();
        for &a in &cfg.barrier_a {
            for &p in &cfg.barrier_points {
                let c = build_barrier_with(&ctx.mesh, ctx.source, p, a, &opts)
                    .with_context(|| format!("barrier at p = ({}, {}) with A = {a}", p[0], p[1]))?;
                certs.push(c);
            }
        }
        Ok(certs)
    })?;
    for c in &certs {
        report.check(
            format!("barrier: A = {} at ({}, {}) certified", c.a, c.p[0], c.p[1]),
            c.is_valid(),
        );
    }
    report.barrier = Some(certs);
    Ok(())
}

fn run_blowup(ctx: &Surface, cfg: &RunConfig, out: &Path, report: &mut Report) -> Result<()> {
    let lap = ctx.ops.discrete_laplacian(&ctx.distance.field)?;
    report.artifacts.extend(write_field(out, &ctx.mesh, "laplacian_distance", lap.values())?);

    let summary = timed(report, "blowup", || {
        let mut levels = Vec::with_capacity(cfg.blowup_levels);
        let mut grid_h = Vec::new();
        for k in 0..cfg.blowup_levels {
            let mesh = match &cfg.surface {
                SurfaceSpec::Torus { l1, l2, n1, n2 } => {
                    let (a, b) = (n1 << k, n2 << k);
                    grid_h.push((l1 / a as f64).max(l2 / b as f64));
                    make_flat_torus(*l1, *l2, a, b)?
                }
                SurfaceSpec::Sphere { subdivisions } => make_icosphere(subdivisions + k)?,
                SurfaceSpec::File { .. } => bail!("blowup needs an analytic surface (torus or sphere)"),
            };
            // torus indices change under refinement, so match the source by position
            let source = refined_source(ctx, &mesh)?;
            levels.push((mesh, source));
        }
        let radial = match cfg.surface {
            SurfaceSpec::Sphere { .. } => levels
                .iter()
                .map(|(m, b)| Ok(sphere_radial_check(m, *b, cfg.r_min, cfg.r_max)?))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        let table = blowup_probe(&levels)?;
        Ok(BlowupSummary { table, grid_h, radial })
    })?;
    let t = &summary.table;
    report.check("blowup: near-cut minimum negative at every level", t.all_negative);
    match cfg.surface {
        SurfaceSpec::Sphere { .. } => {
            report.check(
                "blowup: near-antipode minimum strictly decreases",
                t.rows.windows(2).all(|w| w[1].min_laplacian < w[0].min_laplacian),
            );
            for (r, row) in summary.radial.iter().zip(&t.rows) {
                report.check(format!("blowup: cot(r) match at {} vertices", row.vertices), r.passed);
            }
        }
        _ => {
            for (row, h) in t.rows.iter().zip(&summary.grid_h) {
                report.check(
                    format!("blowup: near-cross minimum <= -1/(4h) at {} vertices", row.vertices),
                    row.min_laplacian <= -1.0 / (4.0 * h),
                );
            }
        }
    }
    report.blowup = Some(summary);
    Ok(())
}

/// Source vertex on a refined analytic mesh matching the configured source.
fn refined_source(ctx: &Surface, mesh: &Mesh) -> Result<SourcePoint> {
    let key = |m: &Mesh, i: usize| match m.uv() {
        Some(uv) => [uv[i][0], uv[i][1], 0.0],
        None => m.vertices()[i],
    };
    let target = key(&ctx.mesh, ctx.source.vertex_id);
    let best = (0..mesh.num_vertices())
        .min_by(|&a, &b| {
            let da: f64 = (0..3).map(|c| (key(mesh, a)[c] - target[c]).powi(2)).sum();
            let db: f64 = (0..3).map(|c| (key(mesh, b)[c] - target[c]).powi(2)).sum();
            da.total_cmp(&db)
        })
        .expect("non-empty mesh");
    Ok(SourcePoint::new(mesh, best)?)
}

fn run_smooth(ctx: &Surface, cfg: &RunConfig, sol: &ObstacleSolution, out: &Path, report: &mut Report) -> Result<()> {
    let (sm, inv, disc) = timed(report, "smooth", || {
        let sm = build_smoothed(&ctx.mesh, &ctx.ops, sol, &ctx.distance, ctx.truth.as_ref(), cfg.passes)?;
        let inv = check_invariants(&sm, sol, &ctx.distance)?;
        let problem = ObstacleProblem::new(&ctx.ops, ctx.distance.field.clone(), cfg.m)?;
        let disc = verify_equivalence(&problem, &sm, &cfg.solver)?;
        Ok((sm, inv, disc))
    })?;
    report.check("smooth: smoothed obstacle invariants", inv.all());
    report.check(
        "smooth: solution unchanged within 10 tol_kkt",
        disc <= 10.0 * cfg.solver.tol_kkt,
    );
    report.artifacts.extend(write_field(out, &ctx.mesh, "smoothed_obstacle", sm.field.values())?);
    report.artifacts.extend(write_field(out, &ctx.mesh, "rho", sm.rho.values())?);
    report.artifacts.extend(write_field(out, &ctx.mesh, "mollified", sm.mollified.values())?);
    report.smoothing = Some(SmoothingSummary {
        metrics: sm.metrics,
        invariants: inv,
        equivalence_discrepancy: disc,
    });
    Ok(())
}

fn execute(command: Command, cfg: &RunConfig, out: &Path, report: &mut Report) -> Result<()> {
    let ctx = prepare(cfg, report)?;
    let is_torus = matches!(ctx.mesh.tag(), SurfaceTag::FlatTorus { .. });
    let analytic = ctx.mesh.tag() != SurfaceTag::Generic;
    match command {
        Command::Solve => {
            run_solve(&ctx, cfg, out, report)?;
        }
        Command::Detect => {
            let sol = run_solve(&ctx, cfg, out, report)?;
            run_detect(&ctx, cfg, &sol, out, report)?;
        }
        Command::Barrier => run_barrier(&ctx, cfg, report)?,
        Command::Blowup => run_blowup(&ctx, cfg, out, report)?,
        Command::Smooth => {
            let sol = run_solve(&ctx, cfg, out, report)?;
            run_smooth(&ctx, cfg, &sol, out, report)?;
        }
        Command::All => {
            let sol = run_solve(&ctx, cfg, out, report)?;
            run_detect(&ctx, cfg, &sol, out, report)?;
            run_smooth(&ctx, cfg, &sol, out, report)?;
            if is_torus {
                run_barrier(&ctx, cfg, report)?;
            }
            if analytic {
                run_blowup(&ctx, cfg, out, report)?;
            }
        }
    }
    Ok(())
}

/// Runs `command`, always writing `report.json`; returns whether every check passed.
pub fn run(command: Command, cfg: RunConfig, out: &Path) -> Result<bool> {
    let mut report = Report {
        command,
        config: cfg.clone(),
        surface: None,
        solve: None,
        cut_locus: None,
        barrier: None,
        blowup: None,
        smoothing: None,
        checks: Vec::new(),
        artifacts: Vec::new(),
        error: None,
        passed: false,
        timings: BTreeMap::new(),
    };
    let total = Instant::now();
    if let Err(e) = execute(command, &cfg, out, &mut report) {
        report.error = Some(format!("{e:#}"));
    }
    report.timings.insert("total".into(), total.elapsed().as_secs_f64());
    report.passed = report.error.is_none() && report.checks.iter().all(|c| c.passed);
    report.artifacts.push("report.json".into());
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out.join("report.json"), json + "\n").context("writing report.json")?;

    for c in &report.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    Ok(report.passed)
}
