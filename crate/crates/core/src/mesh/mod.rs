//! Indexed triangle meshes of closed surfaces.
//!
//! Geometry is intrinsic: on a [`SurfaceTag::FlatTorus`] every length, angle
//! and area comes from the periodic `uv` chart (shortest representative per
//! edge), never from the 3D embedding, which only exists for export.

mod generators;
mod io;

pub use generators::{make_flat_torus, make_icosphere};
pub use io::{load_mesh, read_obj, read_off, save_mesh, write_obj, write_off, MeshFormat};

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::{Error, Result};

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a mesh; fields and operators remember which mesh they index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshId(u64);

impl MeshId {
    fn fresh() -> Self {
        MeshId(NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceTag {
    Generic,
    FlatTorus { l1: f64, l2: f64 },
    UnitSphere,
}

impl SurfaceTag {
    fn expected_euler(&self) -> Option<i64> {
        match self {
            SurfaceTag::Generic => None,
            SurfaceTag::FlatTorus { .. } => Some(0),
            SurfaceTag::UnitSphere => Some(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    id: MeshId,
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
    tag: SurfaceTag,
    uv: Option<Vec<[f64; 2]>>,
}

impl Mesh {
    /// Builds and validates a closed mesh. `uv` is required for (and only
    /// meaningful on) flat tori.
    pub fn new(
        vertices: Vec<[f64; 3]>,
        triangles: Vec<[usize; 3]>,
        tag: SurfaceTag,
        uv: Option<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        match (&tag, &uv) {
            (SurfaceTag::FlatTorus { l1, l2 }, Some(uv)) => {
                if !(*l1 > 0.0 && *l2 > 0.0) {
                    return Err(Error::Parameter("torus side lengths must be positive".into()));
                }
                if uv.len() != vertices.len() {
                    return Err(Error::DimensionMismatch {
                        expected: vertices.len(),
                        got: uv.len(),
                    });
                }
            }
            (SurfaceTag::FlatTorus { .. }, None) => {
                return Err(Error::Parameter("flat torus requires uv coordinates".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Parameter("uv coordinates are only used on flat tori".into()))
            }
            _ => {}
        }
        let mesh = Mesh {
            id: MeshId::fresh(),
            vertices,
            triangles,
            tag,
            uv,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.triangles.is_empty() {
            return Err(Error::Topology("mesh has no triangles".into()));
        }
        if let Some(i) = self
            .vertices
            .iter()
            .position(|p| p.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::Parameter(format!("vertex {i} has non-finite coordinates")));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= n) {
                return Err(Error::Topology(format!(
                    "triangle {t} references vertex {v} out of range ({n} vertices)"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Topology(format!("triangle {t} repeats a vertex: {tri:?}")));
            }
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                *edge_count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut bad: Vec<_> = edge_count.iter().filter(|(_, &c)| c != 2).collect();
        if !bad.is_empty() {
            bad.sort();
            let ((a, b), c) = bad[0];
            let kind = if *c == 1 { "boundary" } else { "non-manifold" };
            return Err(Error::Topology(format!(
                "{kind} edge ({a}, {b}) shared by {c} triangle(s); {} offending edge(s) in total",
                bad.len()
            )));
        }
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                return Err(Error::Topology(format!("triangle {t} has zero area")));
            }
        }
        if let Some(expected) = self.tag.expected_euler() {
            let chi = self.euler_characteristic();
            if chi != expected {
                return Err(Error::Topology(format!(
                    "Euler characteristic {chi} does not match surface tag (expected {expected})"
                )));
            }
        }
        Ok(())
    }

    pub fn id(&self) -> MeshId {
        self.id
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn tag(&self) -> SurfaceTag {
        self.tag
    }

    pub fn uv(&self) -> Option<&[[f64; 2]]> {
        self.uv.as_deref()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unique undirected edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| edge_key(t[k], t[(k + 1) % 3])))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.edges().len() as i64 + self.num_triangles() as i64
    }

    /// Sorted one-ring neighbours of every vertex.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nbrs = vec![Vec::new(); self.num_vertices()];
        for (a, b) in self.edges() {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for n in &mut nbrs {
            n.sort_unstable();
        }
        nbrs
    }

    /// Displacement from vertex `i` to vertex `j` in the intrinsic frame.
    /// On a flat torus this is the shortest periodic representative in uv
    /// (with zero third component).
    pub fn edge_vector(&self, i: usize, j: usize) -> [f64; 3] {
        match (&self.tag, &self.uv) {
            (SurfaceTag::FlatTorus { l1, l2 }, Some(uv)) => {
                let du = wrap_periodic(uv[j][0] - uv[i][0], *l1);
                let dv = wrap_periodic(uv[j][1] - uv[i][1], *l2);
                [du, dv, 0.0]
            }
            _ => sub(self.vertices[j], self.vertices[i]),
        }
    }

    pub fn edge_length(&self, i: usize, j: usize) -> f64 {
        norm(self.edge_vector(i, j))
    }

    /// Corner positions of triangle `t` in a local intrinsic frame with the
    /// first corner at the origin on tori, or the embedded positions otherwise.
    pub fn triangle_corners(&self, t: usize) -> [[f64; 3]; 3] {
        let [a, b, c] = self.triangles[t];
        match self.tag {
            SurfaceTag::FlatTorus { .. } => {
                [[0.0; 3], self.edge_vector(a, b), self.edge_vector(a, c)]
            }
            _ => [self.vertices[a], self.vertices[b], self.vertices[c]],
        }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_corners(t);
        0.5 * norm(cross(sub(p1, p0), sub(p2, p0)))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Largest intrinsic edge length, used as the mesh size `h`.
    pub fn max_edge_length(&self) -> f64 {
        self.edges()
            .into_iter()
            .map(|(a, b)| self.edge_length(a, b))
            .fold(0.0, f64::max)
    }
}

/// Identifies a source vertex `b` on a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourcePoint {
    pub vertex_id: usize,
}

impl SourcePoint {
    pub fn new(mesh: &Mesh, vertex_id: usize) -> Result<Self> {
        if vertex_id >= mesh.num_vertices() {
            return Err(Error::Parameter(format!(
                "source vertex {vertex_id} out of range ({} vertices)",
                mesh.num_vertices()
            )));
        }
        Ok(SourcePoint { vertex_id })
    }
}

/// Representative of `x` modulo `period` in `[-period/2, period/2)`.
pub fn wrap_periodic(x: f64, period: f64) -> f64 {
    x - period * (x / period + 0.5).floor()
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
