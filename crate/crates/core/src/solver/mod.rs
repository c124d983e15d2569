//! Direct solution of the saddle-point system.
//!
//! The full matrix is factored by a sparse LU with nested-dissection column
//! order and threshold partial pivoting, followed by a few steps of iterative
//! refinement. The zero block is never perturbed.

mod lu;
mod ordering;

pub use lu::SparseLu;
pub use ordering::nested_dissection;

use serde::Serialize;

use crate::assembly::SaddleSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Diagonal pivots within this factor of the column maximum are kept.
    pub pivot_threshold: f64,
    /// Required `‖K z − b‖₂ / ‖b‖₂`.
    pub residual_tolerance: f64,
    pub max_refinement_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { pivot_threshold: 0.1, residual_tolerance: 1e-10, max_refinement_steps: 3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub stress: Vec<f64>,
    pub displacement: Vec<f64>,
    pub relative_residual: f64,
    /// Relative residual after the initial solve and each refinement step.
    pub residual_history: Vec<f64>,
    /// Stored entries in the `L` and `U` factors.
    pub factor_nnz: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64], bnorm: f64) -> (Vec<f64>, f64) {
    let ax = a.mul_vec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let rel = norm2(&r) / bnorm;
    (r, rel)
}

/// Solves a square sparse system. Returns the solution, the residual
/// history and the factor size.
pub fn solve_csr(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    if a.nrows != a.ncols || b.len() != a.nrows {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, right-hand side has {} entries",
            a.nrows,
            a.ncols,
            b.len()
        )));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; b.len()], vec![0.0], 0));
    }
    let q = nested_dissection(a);
    let lu = SparseLu::factor(a, &q, opts.pivot_threshold)?;
    let mut x = lu.solve(b);
    let (mut r, mut rel) = relative_residual(a, &x, b, bnorm);
    let mut history = vec![rel];
    for _ in 0..opts.max_refinement_steps {
        if rel <= opts.residual_tolerance * 1e-3 {
            break;
        }
        let dx = lu.solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (r2, rel2) = relative_residual(a, &trial, b, bnorm);
        history.push(rel2);
        if rel2 >= rel {
            break;
        }
        x = trial;
        r = r2;
        rel = rel2;
    }
    if rel.is_nan() || rel > opts.residual_tolerance {
        return Err(Error::ResidualTooLarge { residual: rel, tolerance: opts.residual_tolerance, history });
    }
    Ok((x, history, lu.nnz()))
}

pub fn solve(system: &SaddleSystem) -> Result<Solution> {
    solve_with(system, &SolverOptions::default())
}

pub fn solve_with(system: &SaddleSystem, opts: &SolverOptions) -> Result<Solution> {
    let ns = system.dim_stress();
    if system.divergence.ncols != ns || system.load.len() != system.dim_displacement() {
        return Err(Error::DimensionMismatch(format!(
            "M is {0}x{0}, B is {1}x{2}, F has {3} entries",
            ns,
            system.divergence.nrows,
            system.divergence.ncols,
            system.load.len()
        )));
    }
    let (mut z, history, factor_nnz) = solve_csr(&system.full_matrix(), &system.rhs(), opts)?;
    let displacement = z.split_off(ns);
    Ok(Solution {
        stress: z,
        displacement,
        relative_residual: *history.last().unwrap(),
        residual_history: history,
        factor_nnz,
    })
}
