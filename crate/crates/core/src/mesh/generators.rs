use std::collections::HashMap;
use std::f64::consts::PI;

use super::{cross, dot, edge_key, sub, Mesh, SurfaceTag};
use crate::{Error, Result};

/// Regular `n1 × n2` grid on the flat torus `[0,L1) × [0,L2)`.
///
/// Vertex `(i, j)` has index `j * n1 + i` and uv `(i L1/n1, j L2/n2)`, so
/// vertex 0 sits at the origin. Each cell is split along its `(i,j)–(i+1,j+1)`
/// diagonal. The 3D positions are a (non-isometric) ring torus for export.
pub fn make_flat_torus(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Mesh> {
    if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
        return Err(Error::Parameter(format!(
            "torus side lengths must be positive, got ({l1}, {l2})"
        )));
    }
    if n1 < 3 || n2 < 3 {
        return Err(Error::Parameter(format!(
            "torus resolution must be at least 3x3, got {n1}x{n2}"
        )));
    }
    let idx = |i: usize, j: usize| (j % n2) * n1 + (i % n1);

    let tube = l2 / (2.0 * PI);
    let ring = tube + l1 / (2.0 * PI);
    let mut vertices = Vec::with_capacity(n1 * n2);
    let mut uv = Vec::with_capacity(n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let u = i as f64 * l1 / n1 as f64;
            let v = j as f64 * l2 / n2 as f64;
            let (s1, c1) = (2.0 * PI * u / l1).sin_cos();
            let (s2, c2) = (2.0 * PI * v / l2).sin_cos();
            vertices.push([(ring + tube * c2) * c1, (ring + tube * c2) * s1, tube * s2]);
            uv.push([u, v]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh::new(vertices, triangles, SurfaceTag::FlatTorus { l1, l2 }, Some(uv))
}

/// Unit icosphere: an icosahedron with poles at `(0,0,±1)`, subdivided
/// `subdivisions` times by edge midpoints projected back to the sphere.
///
/// Vertex 0 is the north pole and vertex 11 the south pole at every level;
/// the vertex set is centrally symmetric.
pub fn make_icosphere(subdivisions: usize) -> Result<Mesh> {
    if subdivisions > 8 {
        return Err(Error::Parameter(format!(
            "icosphere subdivision {subdivisions} exceeds supported maximum 8"
        )));
    }
    let z = 1.0 / 5f64.sqrt();
    let r = 2.0 * z;
    let mut vertices = vec![[0.0, 0.0, 1.0]];
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0;
        vertices.push([r * a.cos(), r * a.sin(), z]);
    }
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0 + PI / 5.0;
        vertices.push([r * a.cos(), r * a.sin(), -z]);
    }
    vertices.push([0.0, 0.0, -1.0]);

    let up = |k: usize| 1 + k % 5;
    let lo = |k: usize| 6 + k % 5;
    let mut triangles = Vec::with_capacity(20);
    for k in 0..5 {
        triangles.push([0, up(k), up(k + 1)]);
        triangles.push([up(k), lo(k), up(k + 1)]);
        triangles.push([up(k + 1), lo(k), lo(k + 1)]);
        triangles.push([11, lo(k + 1), lo(k)]);
    }

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let mut mid = |p: usize, q: usize| {
                *midpoint.entry(edge_key(p, q)).or_insert_with(|| {
                    let m = normalize([
                        vertices[p][0] + vertices[q][0],
                        vertices[p][1] + vertices[q][1],
                        vertices[p][2] + vertices[q][2],
                    ]);
                    vertices.push(m);
                    vertices.len() - 1
                })
            };
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        triangles = next;
    }

    for t in &mut triangles {
        let [p0, p1, p2] = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
        if dot(cross(sub(p1, p0), sub(p2, p0)), p0) < 0.0 {
            t.swap(1, 2);
        }
    }
    Mesh::new(vertices, triangles, SurfaceTag::UnitSphere, None)
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = dot(p, p).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}
