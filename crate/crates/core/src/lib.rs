//! Obstacle problems on closed triangulated surfaces where the obstacle is the
//! geodesic distance to a source point.
//!
//! The crate discretizes
//!
//! ```text
//!     min  ∫ |∇u|² − m ∫ u     subject to  u ≤ d_b
//! ```
//!
//! with P1 cotangent elements and a lumped mass, solves it by projected SOR,
//! and studies how the non-contact set `{u < d_b}` relates to the cut locus of
//! the source. Analytic test surfaces (flat torus, unit sphere) carry exact
//! distance and cut-locus ground truth.
//!
//! Sign convention: [`fem::FemOperators::discrete_laplacian`] returns `Δu`
//! with the analyst's sign, so a concave bump has negative Laplacian and
//! `Δ r = cot r` on the unit sphere.

// `!(x > 0.0)` is used on purpose so NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod cutlocus;
pub mod error;
pub mod fem;
pub mod field;
pub mod geodesic;
pub mod mesh;
pub mod obstacle;
pub mod smoothing;
pub mod sparsela;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use mesh::{Mesh, MeshId, SourcePoint, SurfaceTag};
