use crate::mesh::{Mesh, MeshId};
use crate::{Error, Result};

/// One real value per vertex of a specific mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
    mesh_id: MeshId,
}

impl ScalarField {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        Self::with_id(mesh.id(), mesh.num_vertices(), values)
    }

    pub(crate) fn with_id(mesh_id: MeshId, expected: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "field value at vertex {i} is not finite"
            )));
        }
        Ok(Self { values, mesh_id })
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Result<Self> {
        Self::new(mesh, vec![value; mesh.num_vertices()])
    }

    pub fn from_fn(mesh: &Mesh, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new(mesh, (0..mesh.num_vertices()).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Returns a field on the same mesh built from new values.
    pub fn derive(&self, values: Vec<f64>) -> Result<Self> {
        Self::with_id(self.mesh_id, self.values.len(), values)
    }

    pub fn ensure_on(&self, id: MeshId) -> Result<()> {
        if self.mesh_id == id {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        other.ensure_on(self.mesh_id)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
