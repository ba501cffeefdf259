//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export wraps a plain Rust function so the numerics can be tested
//! natively; the wasm layer only moves flat `f64` buffers.

use cutloc_core::barrier::{blowup_probe, build_barrier_with, BarrierOptions};
use cutloc_core::cutlocus::{default_theta, detect};
use cutloc_core::fem::assemble;
use cutloc_core::geodesic::{analytic_cut_locus, analytic_distance, torus_distance};
use cutloc_core::mesh::{make_flat_torus, make_icosphere};
use cutloc_core::obstacle::{solve, ObstacleProblem, SolverConfig};
use cutloc_core::SourcePoint;
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a solve under a second or two.
pub const MAX_GRID: usize = 96;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct TorusSolve {
    n: usize,
    u: Vec<f64>,
    gap: Vec<f64>,
    noncontact: Vec<f64>,
    iterations: usize,
    kkt_residual: f64,
    coverage: f64,
}

#[wasm_bindgen]
impl TorusSolve {
    pub fn n(&self) -> usize {
        self.n
    }
    /// Row-major `n × n` values of the solution.
    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }
    /// `d − u`, zero on the contact set.
    pub fn gap(&self) -> Vec<f64> {
        self.gap.clone()
    }
    pub fn noncontact(&self) -> Vec<f64> {
        self.noncontact.clone()
    }
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    pub fn kkt_residual(&self) -> f64 {
        self.kkt_residual
    }
    pub fn coverage(&self) -> f64 {
        self.coverage
    }
}

pub fn solve_torus(n: usize, m: f64) -> Result<TorusSolve, String> {
    if !(4..=MAX_GRID).contains(&n) {
        return Err(format!("grid size must lie in 4..={MAX_GRID}"));
    }
    let mesh = make_flat_torus(1.0, 1.0, n, n).map_err(|e| e.to_string())?;
    let b = SourcePoint::new(&mesh, 0).map_err(|e| e.to_string())?;
    let ops = assemble(&mesh).map_err(|e| e.to_string())?;
    let d = analytic_distance(&mesh, b).map_err(|e| e.to_string())?;
    let truth = analytic_cut_locus(&mesh, b).map_err(|e| e.to_string())?;
    let problem = ObstacleProblem::new(&ops, d.field.clone(), m).map_err(|e| e.to_string())?;
    let cfg = SolverConfig::default();
    let sol = solve(&problem, &cfg).map_err(|e| e.to_string())?;
    let rep = detect(&mesh, &sol, &d, Some(&truth), default_theta(cfg.tol_kkt)).map_err(|e| e.to_string())?;
    Ok(TorusSolve {
        n,
        gap: d.values().iter().zip(sol.u.values()).map(|(d, u)| d - u).collect(),
        noncontact: rep.noncontact.iter().map(|&f| f as u8 as f64).collect(),
        u: sol.u.into_values(),
        iterations: sol.iterations,
        kkt_residual: sol.kkt_residual,
        coverage: rep.coverage.unwrap_or(f64::NAN),
    })
}

#[wasm_bindgen(js_name = solveTorus)]
pub fn solve_torus_js(n: usize, m: f64) -> Result<TorusSolve, JsError> {
    solve_torus(n, m).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct BarrierProfile {
    c: f64,
    b: f64,
    laplacian: f64,
    margin: f64,
    radius: f64,
    offsets: Vec<f64>,
    phi: Vec<f64>,
    distance: Vec<f64>,
}

#[wasm_bindgen]
impl BarrierProfile {
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn laplacian(&self) -> f64 {
        self.laplacian
    }
    pub fn margin(&self) -> f64 {
        self.margin
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    /// Signed offsets along `v − w` (the direction across the cut).
    pub fn offsets(&self) -> Vec<f64> {
        self.offsets.clone()
    }
    pub fn phi(&self) -> Vec<f64> {
        self.phi.clone()
    }
    pub fn distance(&self) -> Vec<f64> {
        self.distance.clone()
    }
}

/// Barrier at `(px, py)` on the unit torus with source at the origin, sampled
/// along the line across the cut through `p`.
pub fn barrier_profile(px: f64, py: f64, a: f64, points: usize) -> Result<BarrierProfile, String> {
    let mesh = make_flat_torus(1.0, 1.0, 8, 8).map_err(|e| e.to_string())?;
    let b = SourcePoint::new(&mesh, 0).map_err(|e| e.to_string())?;
    let opts = BarrierOptions {
        radius: 0.05,
        samples: 4000,
    };
    let cert = build_barrier_with(&mesh, b, [px, py], a, &opts).map_err(|e| e.to_string())?;
    let dir = [cert.v[0] - cert.w[0], cert.v[1] - cert.w[1]];
    let len = dir[0].hypot(dir[1]);
    let dir = [dir[0] / len, dir[1] / len];
    let points = points.max(3);
    let mut offsets = Vec::with_capacity(points);
    let mut phi = Vec::with_capacity(points);
    let mut distance = Vec::with_capacity(points);
    for k in 0..points {
        let t = cert.radius * (2.0 * k as f64 / (points - 1) as f64 - 1.0);
        let x = [t * dir[0], t * dir[1]];
        offsets.push(t);
        phi.push(cert.phi(x));
        distance.push(torus_distance([cert.p[0] + x[0], cert.p[1] + x[1]], [0.0, 0.0], 1.0, 1.0));
    }
    Ok(BarrierProfile {
        c: cert.c,
        b: cert.b,
        laplacian: cert.laplacian_at_p,
        margin: cert.local_min_margin,
        radius: cert.radius,
        offsets,
        phi,
        distance,
    })
}

#[wasm_bindgen(js_name = barrierProfile)]
pub fn barrier_profile_js(px: f64, py: f64, a: f64, points: usize) -> Result<BarrierProfile, JsError> {
    barrier_profile(px, py, a, points).map_err(|e| JsError::new(&e))
}

/// Minimum discrete Laplacian of the sphere distance near the antipode for
/// subdivisions `1..=max_level`, as `[h, min, h, min, ...]`.
pub fn sphere_blowup(max_level: usize) -> Result<Vec<f64>, String> {
    if !(2..=5).contains(&max_level) {
        return Err("max_level must lie in 2..=5".into());
    }
    let levels = (1..=max_level)
        .map(|k| {
            let mesh = make_icosphere(k).map_err(|e| e.to_string())?;
            let b = SourcePoint::new(&mesh, 0).map_err(|e| e.to_string())?;
            Ok((mesh, b))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let table = blowup_probe(&levels).map_err(|e| e.to_string())?;
    Ok(table.rows.iter().flat_map(|r| [r.h, r.min_laplacian]).collect())
}

#[wasm_bindgen(js_name = sphereBlowup)]
pub fn sphere_blowup_js(max_level: usize) -> Result<Vec<f64>, JsError> {
    sphere_blowup(max_level).map_err(|e| JsError::new(&e))
}
