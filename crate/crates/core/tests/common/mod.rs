#![allow(dead_code)]

use cutloc_core::fem::{assemble, FemOperators};
use cutloc_core::geodesic::{analytic_cut_locus, analytic_distance, CutLocusTruth, DistanceField};
use cutloc_core::mesh::{make_flat_torus, make_icosphere};
use cutloc_core::obstacle::{solve, ObstacleProblem, ObstacleSolution, SolverConfig};
use cutloc_core::{Mesh, SourcePoint};

/// Source vertex at the north pole of the icosphere.
pub const NORTH: usize = 0;
/// Its antipode.
pub const SOUTH: usize = 11;

pub struct Setup {
    pub mesh: Mesh,
    pub source: SourcePoint,
    pub ops: FemOperators,
    pub distance: DistanceField,
    pub truth: CutLocusTruth,
}

impl Setup {
    pub fn new(mesh: Mesh) -> Self {
        let source = SourcePoint::new(&mesh, 0).unwrap();
        let ops = assemble(&mesh).unwrap();
        let distance = analytic_distance(&mesh, source).unwrap();
        let truth = analytic_cut_locus(&mesh, source).unwrap();
        Setup {
            mesh,
            source,
            ops,
            distance,
            truth,
        }
    }

    pub fn torus(n: usize) -> Self {
        Self::new(make_flat_torus(1.0, 1.0, n, n).unwrap())
    }

    pub fn sphere(k: usize) -> Self {
        Self::new(make_icosphere(k).unwrap())
    }

    pub fn problem(&self, m: f64) -> ObstacleProblem<'_> {
        ObstacleProblem::new(&self.ops, self.distance.field.clone(), m).unwrap()
    }

    pub fn solve(&self, m: f64, config: &SolverConfig) -> ObstacleSolution {
        solve(&self.problem(m), config).unwrap()
    }
}

/// Vertex index of grid point (i, j) on an n1-wide torus.
pub fn grid(n1: usize, i: usize, j: usize) -> usize {
    j * n1 + i
}
