//! Distance to a source vertex: exact formulas on the analytic surfaces and
//! first-order fast marching on arbitrary meshes, plus the analytic cut locus.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::mesh::{dot, norm, sub, wrap_periodic, Mesh, SourcePoint, SurfaceTag};
use crate::{Error, Result, ScalarField};

/// Lattice translates searched on the flat torus, identity first.
pub const TORUS_TRANSLATES: [(i32, i32); 9] = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    FastMarching,
    Analytic,
}

#[derive(Debug, Clone)]
pub struct DistanceField {
    pub field: ScalarField,
    pub source: SourcePoint,
    pub method: DistanceMethod,
}

impl DistanceField {
    pub fn values(&self) -> &[f64] {
        self.field.values()
    }
}

/// Per-translate displacement `p − b − t` for the nine translates in
/// [`TORUS_TRANSLATES`]. `p` and `b` should lie in the fundamental domain.
pub fn torus_branches(p: [f64; 2], b: [f64; 2], l1: f64, l2: f64) -> [[f64; 2]; 9] {
    TORUS_TRANSLATES.map(|(k1, k2)| {
        [
            p[0] - b[0] - k1 as f64 * l1,
            p[1] - b[1] - k2 as f64 * l2,
        ]
    })
}

/// Flat-torus distance: minimum over the nine nearest lattice translates.
pub fn torus_distance(p: [f64; 2], b: [f64; 2], l1: f64, l2: f64) -> f64 {
    let p = [p[0].rem_euclid(l1), p[1].rem_euclid(l2)];
    let b = [b[0].rem_euclid(l1), b[1].rem_euclid(l2)];
    torus_branches(p, b, l1, l2)
        .iter()
        .map(|d| d[0].hypot(d[1]))
        .fold(f64::INFINITY, f64::min)
}

pub fn sphere_distance(p: [f64; 3], q: [f64; 3]) -> f64 {
    dot(p, q).clamp(-1.0, 1.0).acos()
}

pub fn analytic_distance(mesh: &Mesh, b: SourcePoint) -> Result<DistanceField> {
    let values = match mesh.tag() {
        SurfaceTag::FlatTorus { l1, l2 } => {
            let uv = mesh.uv().expect("torus has uv");
            let src = uv[b.vertex_id];
            uv.iter().map(|&p| torus_distance(p, src, l1, l2)).collect()
        }
        SurfaceTag::UnitSphere => {
            let src = mesh.vertices()[b.vertex_id];
            mesh.vertices().iter().map(|&p| sphere_distance(p, src)).collect()
        }
        SurfaceTag::Generic => return Err(Error::UnsupportedSurface),
    };
    Ok(DistanceField {
        field: ScalarField::new(mesh, values)?,
        source: b,
        method: DistanceMethod::Analytic,
    })
}

/// Analytic cut locus as a distance-to-set oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutLocusTruth {
    /// The cross `{u ≡ c₁} ∪ {v ≡ c₂}` with `c = b + (L1/2, L2/2)`.
    TorusCross { center: [f64; 2], l1: f64, l2: f64 },
    /// The antipode of the source.
    SphereAntipode { antipode: [f64; 3] },
}

impl CutLocusTruth {
    pub fn distance_to_uv(&self, p: [f64; 2]) -> f64 {
        match *self {
            CutLocusTruth::TorusCross { center, l1, l2 } => wrap_periodic(p[0] - center[0], l1)
                .abs()
                .min(wrap_periodic(p[1] - center[1], l2).abs()),
            CutLocusTruth::SphereAntipode { .. } => {
                panic!("uv query on a spherical cut locus")
            }
        }
    }

    /// Intrinsic distance from vertex `i` to the cut locus.
    pub fn distance_at(&self, mesh: &Mesh, i: usize) -> f64 {
        match *self {
            CutLocusTruth::TorusCross { .. } => {
                self.distance_to_uv(mesh.uv().expect("torus has uv")[i])
            }
            CutLocusTruth::SphereAntipode { antipode } => {
                sphere_distance(mesh.vertices()[i], antipode)
            }
        }
    }

    pub fn distances(&self, mesh: &Mesh) -> Vec<f64> {
        (0..mesh.num_vertices()).map(|i| self.distance_at(mesh, i)).collect()
    }

    /// Distance from the source to its nearest cut point.
    pub fn injectivity_radius(&self) -> f64 {
        match *self {
            CutLocusTruth::TorusCross { l1, l2, .. } => 0.5 * l1.min(l2),
            CutLocusTruth::SphereAntipode { .. } => PI,
        }
    }
}

pub fn analytic_cut_locus(mesh: &Mesh, b: SourcePoint) -> Result<CutLocusTruth> {
    match mesh.tag() {
        SurfaceTag::FlatTorus { l1, l2 } => {
            let src = mesh.uv().expect("torus has uv")[b.vertex_id];
            Ok(CutLocusTruth::TorusCross {
                center: [
                    (src[0] + 0.5 * l1).rem_euclid(l1),
                    (src[1] + 0.5 * l2).rem_euclid(l2),
                ],
                l1,
                l2,
            })
        }
        SurfaceTag::UnitSphere => {
            let p = mesh.vertices()[b.vertex_id];
            Ok(CutLocusTruth::SphereAntipode {
                antipode: [-p[0], -p[1], -p[2]],
            })
        }
        SurfaceTag::Generic => Err(Error::UnsupportedSurface),
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Candidate {
    value: f64,
    vertex: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on value, ties by vertex index
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn fast_marching(mesh: &Mesh, b: SourcePoint) -> Result<DistanceField> {
    fast_marching_traced(mesh, b).map(|(d, _)| d)
}

/// Fast marching that also returns the values in the order vertices were
/// accepted.
pub fn fast_marching_traced(mesh: &Mesh, b: SourcePoint) -> Result<(DistanceField, Vec<f64>)> {
    let n = mesh.num_vertices();
    let src = b.vertex_id;
    if src >= n {
        return Err(Error::Parameter(format!("source vertex {src} out of range")));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &v in tri {
            incident[v].push(t);
        }
    }
    let nbrs = mesh.vertex_neighbors();

    let mut value = vec![f64::INFINITY; n];
    let mut known = vec![false; n];
    let mut frozen = vec![false; n];
    let mut heap = BinaryHeap::new();

    value[src] = 0.0;
    frozen[src] = true;
    heap.push(Candidate { value: 0.0, vertex: src });
    for &j in &nbrs[src] {
        let d = match mesh.tag() {
            SurfaceTag::UnitSphere => sphere_distance(mesh.vertices()[j], mesh.vertices()[src]),
            _ => mesh.edge_length(src, j),
        };
        value[j] = d;
        frozen[j] = true;
        heap.push(Candidate { value: d, vertex: j });
    }

    let mut accepted = Vec::with_capacity(n);
    while let Some(Candidate { value: v, vertex: i }) = heap.pop() {
        if known[i] || v > value[i] {
            continue;
        }
        known[i] = true;
        accepted.push(v);
        for &t in &incident[i] {
            let tri = mesh.triangles()[t];
            let corners = mesh.triangle_corners(t);
            for c in 0..3 {
                let k = tri[c];
                if known[k] || frozen[k] {
                    continue;
                }
                let (a, bb) = ((c + 1) % 3, (c + 2) % 3);
                let (va, vb) = (tri[a], tri[bb]);
                let cand = if known[va] && known[vb] {
                    triangle_update(
                        corners[c],
                        corners[a],
                        corners[bb],
                        value[va],
                        value[vb],
                    )
                } else if known[va] {
                    value[va] + norm(sub(corners[a], corners[c]))
                } else if known[vb] {
                    value[vb] + norm(sub(corners[bb], corners[c]))
                } else {
                    continue;
                };
                if cand < value[k] {
                    value[k] = cand;
                    heap.push(Candidate { value: cand, vertex: k });
                }
            }
        }
    }
    if let Some(i) = value.iter().position(|v| !v.is_finite()) {
        return Err(Error::Topology(format!(
            "vertex {i} unreachable from source {src}"
        )));
    }
    Ok((
        DistanceField {
            field: ScalarField::new(mesh, value)?,
            source: b,
            method: DistanceMethod::FastMarching,
        },
        accepted,
    ))
}

/// Planar-front update of corner `c` from known corners `a`, `b`. Falls back
/// to edge-wise Dijkstra when the front direction does not arrive from
/// inside the triangle (obtuse configurations) or the quadratic has no
/// admissible root.
fn triangle_update(c: [f64; 3], a: [f64; 3], b: [f64; 3], ta: f64, tb: f64) -> f64 {
    let ea = sub(a, c);
    let eb = sub(b, c);
    let dijkstra = (ta + norm(ea)).min(tb + norm(eb));

    // Q = (XᵀX)⁻¹ with X = [ea, eb]
    let (g11, g12, g22) = (dot(ea, ea), dot(ea, eb), dot(eb, eb));
    let det = g11 * g22 - g12 * g12;
    if !(det > 0.0) {
        return dijkstra;
    }
    let (q11, q12, q22) = (g22 / det, -g12 / det, g11 / det);
    let q1 = [q11 + q12, q12 + q22]; // Q·1
    let a2 = q1[0] + q1[1]; // 1ᵀQ1
    let a1 = q1[0] * ta + q1[1] * tb; // 1ᵀQt
    let qt = [q11 * ta + q12 * tb, q12 * ta + q22 * tb];
    let a0 = ta * qt[0] + tb * qt[1] - 1.0; // tᵀQt − 1
    let disc = a1 * a1 - a2 * a0;
    if !(disc >= 0.0) || !(a2 > 0.0) {
        return dijkstra;
    }
    let t = (a1 + disc.sqrt()) / a2;
    // upwind: Q(t − T·1) ≤ 0 componentwise
    let beta = [qt[0] - t * q1[0], qt[1] - t * q1[1]];
    if t >= ta.max(tb) && beta[0] <= 0.0 && beta[1] <= 0.0 {
        t.min(dijkstra)
    } else {
        dijkstra
    }
}
