//! Upper barriers for the distance function at cut points.
//!
//! At a point `p` of the flat torus reached by exactly two minimizing
//! segments, `x ↦ C|x|² − d_b(p + x)` is convex with two distinct subgradients
//! `v`, `w` at the origin. The smooth function
//!
//! ```text
//!     φ(x) = C|x|² − ½(v + w)·x − B((v − w)·x)² + d_b(p)
//! ```
//!
//! touches `d_b` from above at `p`, and its Laplacian `2nC − 2B|v − w|²` can be
//! driven below any `−A` by taking `B` large. The uv chart of the flat torus is
//! a global normal-coordinate chart, so all of this is exact.
//!
//! [`blowup_probe`] measures the same phenomenon on the discrete side: the
//! cotangent Laplacian of the sampled distance near the cut locus.

use serde::Serialize;

use crate::fem::assemble;
use crate::geodesic::{
    analytic_cut_locus, analytic_distance, torus_branches, torus_distance, TORUS_TRANSLATES,
};
use crate::{Error, Mesh, Result, SourcePoint, SurfaceTag};

/// Surface dimension.
const DIM: f64 = 2.0;
/// Branch displacements within this of the minimum count as minimizers.
const TIE_TOL: f64 = 1e-9;
/// Smallest admissible sampling radius.
const MIN_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierOptions {
    pub radius: f64,
    pub samples: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions {
            radius: 0.05,
            samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierCertificate {
    pub p: [f64; 2],
    pub v: [f64; 2],
    pub w: [f64; 2],
    pub c: f64,
    pub b: f64,
    pub a: f64,
    pub distance_at_p: f64,
    /// `2nC − 2B|v − w|²` with `n = 2`.
    pub laplacian_at_p: f64,
    /// `φ(p) − d_b(p)`.
    pub value_gap_at_p: f64,
    /// `min (φ − d_b)` over the sampled disk.
    pub local_min_margin: f64,
    /// Worst violation of `v·x − d_b(p) ≤ C|x|² − d_b(p + x)` (and same for `w`).
    pub subgradient_violation: f64,
    pub radius: f64,
    pub samples: usize,
}

impl BarrierCertificate {
    /// Barrier value at displacement `x` from `p` in the uv chart.
    pub fn phi(&self, x: [f64; 2]) -> f64 {
        let s = dot2(sub2(self.v, self.w), x);
        let mean = [0.5 * (self.v[0] + self.w[0]), 0.5 * (self.v[1] + self.w[1])];
        self.c * dot2(x, x) - dot2(mean, x) - self.b * s * s + self.distance_at_p
    }

    pub fn is_valid(&self) -> bool {
        self.v != self.w
            && self.laplacian_at_p <= -self.a
            && self.local_min_margin >= -1e-12
            && self.value_gap_at_p.abs() <= 1e-12
            && self.subgradient_violation <= 1e-12
    }
}

fn torus_params(mesh: &Mesh) -> Result<(f64, f64)> {
    match mesh.tag() {
        SurfaceTag::FlatTorus { l1, l2 } => Ok((l1, l2)),
        _ => Err(Error::UnsupportedSurface),
    }
}

struct Branches {
    p: [f64; 2],
    dist: f64,
    minimizers: Vec<usize>,
    lengths: [f64; 9],
    displacement: [[f64; 2]; 9],
}

fn classify(mesh: &Mesh, b: SourcePoint, p: [f64; 2]) -> Result<Branches> {
    let (l1, l2) = torus_params(mesh)?;
    let p = [p[0].rem_euclid(l1), p[1].rem_euclid(l2)];
    let src = mesh.uv().expect("torus has uv")[b.vertex_id];
    let displacement = torus_branches(p, src, l1, l2);
    let lengths = displacement.map(|d| d[0].hypot(d[1]));
    let dist = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let minimizers: Vec<usize> = (0..9).filter(|&k| lengths[k] - dist <= TIE_TOL).collect();
    match minimizers.len() {
        0 | 1 => Err(Error::NotACutPoint(p[0], p[1])),
        2 => Ok(Branches {
            p,
            dist,
            minimizers,
            lengths,
            displacement,
        }),
        _ => Err(Error::AmbiguousCutPoint(
            minimizers.iter().map(|&k| TORUS_TRANSLATES[k]).collect(),
        )),
    }
}

/// Subgradients `(v, w)` of `C|x|² − d_b` at a two-geodesic cut point: the
/// negated unit gradients of the two minimizing distance branches.
pub fn branch_gradients(mesh: &Mesh, b: SourcePoint, p: [f64; 2]) -> Result<([f64; 2], [f64; 2])> {
    let br = classify(mesh, b, p)?;
    let grad = |k: usize| {
        let d = br.displacement[k];
        [d[0] / br.lengths[k], d[1] / br.lengths[k]]
    };
    let (g1, g2) = (grad(br.minimizers[0]), grad(br.minimizers[1]));
    Ok(([-g1[0], -g1[1]], [-g2[0], -g2[1]]))
}

pub fn build_barrier(mesh: &Mesh, b: SourcePoint, p: [f64; 2], a: f64) -> Result<BarrierCertificate> {
    build_barrier_with(mesh, b, p, a, &BarrierOptions::default())
}

pub fn build_barrier_with(
    mesh: &Mesh,
    b: SourcePoint,
    p: [f64; 2],
    a: f64,
    opts: &BarrierOptions,
) -> Result<BarrierCertificate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("target A = {a} must be positive")));
    }
    if opts.samples == 0 || !(opts.radius > 0.0) {
        return Err(Error::Parameter("sampling radius and count must be positive".into()));
    }
    let (l1, l2) = torus_params(mesh)?;
    let br = classify(mesh, b, p)?;
    let (v, w) = branch_gradients(mesh, b, p)?;
    let dist = br.dist;

    // Each branch |y| has Hessian ≤ I/|y|; C = 2/d + 1 dominates it with margin.
    let c = 2.0 / dist + 1.0;
    let vw = sub2(v, w);
    let q = dot2(vw, vw);
    let b_coef = tune_quadratic_coefficient(c, q, a);
    let laplacian_at_p = laplacian_formula(c, b_coef, q);

    // Shrink the disk so no third branch becomes minimal and the quadratic
    // stays below the kink: |(v − w)·x| ≤ 1/(2B).
    let third = (0..9)
        .filter(|k| !br.minimizers.contains(k))
        .map(|k| br.lengths[k])
        .fold(f64::INFINITY, f64::min);
    let radius = opts
        .radius
        .min(0.5 * (third - dist))
        .min(1.0 / (2.0 * b_coef * q.sqrt()))
        .min(0.5 * dist);
    if radius < MIN_RADIUS {
        return Err(Error::Construction(format!(
            "sampling radius {radius:e} below {MIN_RADIUS:e}"
        )));
    }

    let mut cert = BarrierCertificate {
        p: br.p,
        v,
        w,
        c,
        b: b_coef,
        a,
        distance_at_p: dist,
        laplacian_at_p,
        value_gap_at_p: 0.0,
        local_min_margin: f64::INFINITY,
        subgradient_violation: f64::NEG_INFINITY,
        radius,
        samples: opts.samples,
    };
    let src = mesh.uv().expect("torus has uv")[b.vertex_id];
    let d_b = |x: [f64; 2]| torus_distance([br.p[0] + x[0], br.p[1] + x[1]], src, l1, l2);
    cert.value_gap_at_p = cert.phi([0.0, 0.0]) - d_b([0.0, 0.0]);

    let mut margin = cert.value_gap_at_p;
    let mut violation = f64::NEG_INFINITY;
    for x in disk_samples(radius, opts.samples) {
        let db = d_b(x);
        margin = margin.min(cert.phi(x) - db);
        let convex = c * dot2(x, x) - db;
        for g in [v, w] {
            violation = violation.max(dot2(g, x) - dist - convex);
        }
    }
    cert.local_min_margin = margin;
    cert.subgradient_violation = violation;
    Ok(cert)
}

fn laplacian_formula(c: f64, b: f64, q: f64) -> f64 {
    2.0 * DIM * c - 2.0 * b * q
}

/// `B = (2nC + A) / (2|v − w|²)`, then moved by at most a few ulps so the
/// Laplacian formula evaluates to exactly `−A` in floating point. When `−A`
/// is not representable on the grid of the cancelling terms, `B` is nudged up
/// until the evaluated Laplacian is at most `−A`.
fn tune_quadratic_coefficient(c: f64, q: f64, a: f64) -> f64 {
    let b0 = (2.0 * DIM * c + a) / (2.0 * q);
    if laplacian_formula(c, b0, q) == -a {
        return b0;
    }
    let (mut up, mut down) = (b0, b0);
    for _ in 0..16 {
        up = up.next_up();
        if laplacian_formula(c, up, q) == -a {
            return up;
        }
        down = down.next_down();
        if laplacian_formula(c, down, q) == -a {
            return down;
        }
    }
    let mut b = b0;
    while laplacian_formula(c, b, q) > -a {
        b = b.next_up();
    }
    b
}

/// Quasi-uniform points in the closed disk: a sunflower (golden-angle) spiral
/// plus the boundary circle at the same angular density.
fn disk_samples(radius: f64, count: usize) -> impl Iterator<Item = [f64; 2]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let ring = ((count as f64).sqrt() * 4.0).ceil() as usize;
    let spiral = (0..count).map(move |k| {
        let r = radius * ((k as f64 + 0.5) / count as f64).sqrt();
        let (s, c) = (k as f64 * golden).sin_cos();
        [r * c, r * s]
    });
    let boundary = (0..ring).map(move |k| {
        let (s, c) = (2.0 * std::f64::consts::PI * k as f64 / ring as f64).sin_cos();
        [radius * c, radius * s]
    });
    spiral.chain(boundary)
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupRow {
    pub vertices: usize,
    pub h: f64,
    pub near_cut_count: usize,
    /// Minimum discrete Laplacian of `d_b` over vertices within `2h` of the cut locus.
    pub min_laplacian: f64,
    pub argmin_vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupTable {
    pub rows: Vec<BlowupRow>,
    pub all_negative: bool,
    pub nonincreasing: bool,
}

/// Discrete Laplacian of the analytic distance near the cut locus across a
/// sequence of refinements.
pub fn blowup_probe(levels: &[(Mesh, SourcePoint)]) -> Result<BlowupTable> {
    if levels.len() < 2 {
        return Err(Error::Parameter("blow-up probe needs at least two refinement levels".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for (mesh, b) in levels {
        let dist = analytic_distance(mesh, *b)?;
        let truth = analytic_cut_locus(mesh, *b)?;
        let ops = assemble(mesh)?;
        let lap = ops.discrete_laplacian(&dist.field)?;
        let h = mesh.max_edge_length();
        let mut row = BlowupRow {
            vertices: mesh.num_vertices(),
            h,
            near_cut_count: 0,
            min_laplacian: f64::INFINITY,
            argmin_vertex: 0,
        };
        for i in 0..mesh.num_vertices() {
            if truth.distance_at(mesh, i) <= 2.0 * h {
                row.near_cut_count += 1;
                if lap[i] < row.min_laplacian {
                    row.min_laplacian = lap[i];
                    row.argmin_vertex = i;
                }
            }
        }
        rows.push(row);
    }
    let all_negative = rows.iter().all(|r| r.min_laplacian < 0.0);
    let nonincreasing = rows.windows(2).all(|w| w[1].min_laplacian <= w[0].min_laplacian);
    Ok(BlowupTable {
        rows,
        all_negative,
        nonincreasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialCheck {
    pub h: f64,
    pub tolerance: f64,
    pub max_abs_error: f64,
    pub worst_radius: f64,
    pub count: usize,
    pub passed: bool,
}

/// Compares the discrete Laplacian of the sphere distance with `cot r` on the
/// vertices with `r ∈ [r_min, r_max]`; tolerance `max(0.05, 10h)`.
pub fn sphere_radial_check(mesh: &Mesh, b: SourcePoint, r_min: f64, r_max: f64) -> Result<RadialCheck> {
    if mesh.tag() != SurfaceTag::UnitSphere {
        return Err(Error::UnsupportedSurface);
    }
    let dist = analytic_distance(mesh, b)?;
    let lap = assemble(mesh)?.discrete_laplacian(&dist.field)?;
    let h = mesh.max_edge_length();
    let tolerance = (10.0 * h).max(0.05);
    let mut out = RadialCheck {
        h,
        tolerance,
        max_abs_error: 0.0,
        worst_radius: f64::NAN,
        count: 0,
        passed: false,
    };
    for i in 0..mesh.num_vertices() {
        let r = dist.field[i];
        if (r_min..=r_max).contains(&r) {
            out.count += 1;
            let err = (lap[i] - 1.0 / r.tan()).abs();
            if err > out.max_abs_error {
                out.max_abs_error = err;
                out.worst_radius = r;
            }
        }
    }
    out.passed = out.count > 0 && out.max_abs_error <= tolerance;
    Ok(out)
}
