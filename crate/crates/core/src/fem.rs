//! P1 cotangent stiffness and lumped mass.
//!
//! `uᵀ L u = Σ_edges w_ij (u_i − u_j)²` with `w_ij = ½ Σ cot(opposite angle)`
//! approximates `∫|∇u|²`; `Σ m_i u_i` with `m_i = ⅓ Σ area(incident)`
//! approximates `∫u`. On flat tori all angles and areas come from uv.

use crate::mesh::{cross, dot, norm, sub, Mesh, MeshId};
use crate::sparsela::SparseOperator;
use crate::{Error, Result, ScalarField};

/// Triangles with area below this fraction of the mean are rejected.
pub const DEGENERATE_AREA_REL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct FemOperators {
    stiffness: SparseOperator,
    mass: Vec<f64>,
    mesh_id: MeshId,
}

pub fn assemble(mesh: &Mesh) -> Result<FemOperators> {
    let nt = mesh.num_triangles();
    let areas: Vec<f64> = (0..nt).map(|t| mesh.triangle_area(t)).collect();
    let mean = areas.iter().sum::<f64>() / nt as f64;
    let threshold = DEGENERATE_AREA_REL * mean;
    if let Some((t, &a)) = areas.iter().enumerate().find(|(_, &a)| !(a >= threshold)) {
        return Err(Error::DegenerateTriangle {
            triangle: t,
            area: a,
            threshold,
        });
    }

    let n = mesh.num_vertices();
    let mut mass = vec![0.0; n];
    let mut trip = Vec::with_capacity(12 * nt);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_corners(t);
        for k in 0..3 {
            mass[tri[k]] += areas[t] / 3.0;
            // edge (i, j) opposite corner k
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let e1 = sub(p[i], p[k]);
            let e2 = sub(p[j], p[k]);
            let w = 0.5 * dot(e1, e2) / norm(cross(e1, e2));
            let (vi, vj) = (tri[i], tri[j]);
            trip.push((vi, vj, -w));
            trip.push((vj, vi, -w));
            trip.push((vi, vi, w));
            trip.push((vj, vj, w));
        }
    }
    let stiffness = SparseOperator::from_triplets(n, trip, true)?;
    Ok(FemOperators {
        stiffness,
        mass,
        mesh_id: mesh.id(),
    })
}

impl FemOperators {
    pub fn stiffness(&self) -> &SparseOperator {
        &self.stiffness
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `uᵀLu − m Σ mᵢuᵢ`; no factor ½ on the Dirichlet term.
    pub fn energy(&self, u: &ScalarField, m: f64) -> Result<f64> {
        u.ensure_on(self.mesh_id)?;
        let lu = self.stiffness.matvec(u.values())?;
        Ok(energy_from_lu(u.values(), &lu, &self.mass, m))
    }

    /// Discrete Laplace–Beltrami `(Δu)_i = −(Lu)_i / m_i`.
    pub fn discrete_laplacian(&self, u: &ScalarField) -> Result<ScalarField> {
        u.ensure_on(self.mesh_id)?;
        let lu = self.stiffness.matvec(u.values())?;
        u.derive(lu.iter().zip(&self.mass).map(|(l, m)| -l / m).collect())
    }

    /// Gradient of the discrete energy: `g = 2Lu − m·mass`.
    pub fn energy_gradient(&self, u: &[f64], m: f64) -> Result<Vec<f64>> {
        let mut g = self.stiffness.matvec(u)?;
        for (gi, mi) in g.iter_mut().zip(&self.mass) {
            *gi = 2.0 * *gi - m * mi;
        }
        Ok(g)
    }
}

pub(crate) fn energy_from_lu(u: &[f64], lu: &[f64], mass: &[f64], m: f64) -> f64 {
    let quad: f64 = u.iter().zip(lu).map(|(a, b)| a * b).sum();
    let lin: f64 = u.iter().zip(mass).map(|(a, b)| a * b).sum();
    quad - m * lin
}
