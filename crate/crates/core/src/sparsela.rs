//! Compressed-row sparse operators and an unpreconditioned conjugate
//! gradient solver. Every reduction runs in ascending column order so
//! results are bit-stable across runs.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseOperator {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed in
    /// input order. With `symmetric` set, the result is checked for
    /// structural and numerical symmetry (1e-12 relative).
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
        symmetric: bool,
    ) -> Result<Self> {
        let mut trip: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = trip.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::Parameter(format!(
                "entry ({r}, {c}) outside {dim}x{dim} operator"
            )));
        }
        // stable: duplicates keep input order
        trip.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; dim + 1];
        let mut col_indices = Vec::with_capacity(trip.len());
        let mut values: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_offsets[i + 1] += row_offsets[i];
        }
        let op = SparseOperator {
            dim,
            row_offsets,
            col_indices,
            values,
            symmetric,
        };
        if symmetric {
            op.check_symmetric(1e-12)?;
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)), true).expect("identity")
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty(), true).expect("zeros")
    }

    fn check_symmetric(&self, rel_tol: f64) -> Result<()> {
        let scale = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                match self.get(j, i) {
                    Some(b) if (a - b).abs() <= rel_tol * scale.max(f64::MIN_POSITIVE) => {}
                    Some(b) => {
                        return Err(Error::Invariant(format!(
                            "operator not symmetric at ({i}, {j}): {a} vs {b}"
                        )))
                    }
                    None => {
                        return Err(Error::Invariant(format!(
                            "operator not structurally symmetric: ({i}, {j}) present, ({j}, {i}) missing"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &a)| a * x[j]).sum();
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive semidefinite `A`, starting from
/// zero. For singular `A` the caller must supply `b` orthogonal to the kernel.
/// Converged when `‖Ax − b‖₂ ≤ tol·‖b‖₂`.
pub fn conjugate_gradient(
    a: &SparseOperator,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgSolution> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("CG tolerance must be positive".into()));
    }
    let n = a.dim();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual_norm: 0.0,
        });
    }
    let target = tol * bnorm;
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for it in 0..max_iter {
        if rr.sqrt() <= target {
            return Ok(CgSolution {
                x,
                iterations: it,
                residual_norm: rr.sqrt(),
            });
        }
        a.matvec_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    // recompute the true residual before reporting
    let ax = a.matvec(&x)?;
    let res = ax.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    if res <= target {
        return Ok(CgSolution {
            x,
            iterations: max_iter,
            residual_norm: res,
        });
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_update: f64::NAN,
        residual: res,
    })
}
