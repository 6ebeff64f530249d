//! Newton iteration with a banded direct solver and the elimination cost model.

use crate::assembly::TimeLevelSystem;
use crate::band::SolverError;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

/// A square nonlinear system F(x) = 0 with a linear solve for its Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[f64]) -> Vec<f64>;
    /// Solve J(x) dx = rhs; also returns the elimination multiply-add count.
    fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, u64), SolverError>;
    /// Declared (N, d) for the cost model.
    fn band_shape(&self) -> (usize, usize) {
        (self.dim(), self.dim().saturating_sub(1).max(1))
    }
}

impl NonlinearSystem for TimeLevelSystem<'_> {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        TimeLevelSystem::residual(self, x)
    }

    fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, u64), SolverError> {
        self.jacobian(x).solve(rhs)
    }

    fn band_shape(&self) -> (usize, usize) {
        (self.dimension(), self.bandwidth())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Max-norm tolerance on the residual.
    pub tol: f64,
    pub maxit: usize,
    /// Backtracking on the residual max-norm.
    pub line_search: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            maxit: 50,
            line_search: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub final_residual: f64,
    /// Cost model N d² - 2d³/3 + N d - d²/2 per factorization, times the factorizations done.
    pub flop_estimate: f64,
    /// Multiply-adds counted in the factorizations.
    pub measured_flops: u64,
    pub wall_time: f64,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NewtonError {
    #[error("Newton did not converge in {iterations} iterations (best residual {best_residual:e})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        best: Vec<f64>,
        stats: SolveStats,
    },
    #[error("singular Jacobian at iteration {iteration}: {source}")]
    Singular { iteration: usize, source: SolverError },
    #[error("non-finite residual at iteration {iteration}")]
    NonFinite { iteration: usize },
}

/// Elimination cost of an N×N band matrix with bandwidth d: N d² - 2d³/3 + N d - d²/2.
pub fn cost_estimate(n: usize, d: usize) -> f64 {
    let (n, d) = (n as f64, d as f64);
    n * d * d - 2.0 * d * d * d / 3.0 + n * d - d * d / 2.0
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    sys: &S,
    guess: &[f64],
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, SolveStats), NewtonError> {
    let start = Instant::now();
    let (n, d) = sys.band_shape();
    let per_factor = cost_estimate(n, d);
    let mut x = guess.to_vec();
    let mut f = sys.residual(&x);
    let mut norm = max_norm(&f);
    let mut stats = SolveStats {
        residual_history: vec![norm],
        ..Default::default()
    };
    let (mut best, mut best_norm) = (x.clone(), norm);
    let finish = |mut stats: SolveStats, norm: f64| {
        stats.final_residual = norm;
        stats.wall_time = start.elapsed().as_secs_f64();
        stats
    };
    for it in 0..opts.maxit {
        if !norm.is_finite() {
            return Err(NewtonError::NonFinite { iteration: it });
        }
        if norm <= opts.tol {
            return Ok((x, finish(stats, norm)));
        }
        let (dx, flops) = sys
            .solve_jacobian(&x, &f)
            .map_err(|source| NewtonError::Singular {
                iteration: it,
                source,
            })?;
        stats.iterations += 1;
        stats.measured_flops += flops;
        stats.flop_estimate += per_factor;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a - lambda * b).collect();
            let ft = sys.residual(&trial);
            let nt = max_norm(&ft);
            let accept = !opts.line_search
                || nt <= (1.0 - 1e-4 * lambda) * norm
                || lambda < 1.0 / 64.0;
            if accept {
                x = trial;
                f = ft;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
        stats.residual_history.push(norm);
        if norm < best_norm {
            best_norm = norm;
            best = x.clone();
        }
    }
    if norm <= opts.tol {
        return Ok((x, finish(stats, norm)));
    }
    let stats = finish(stats, best_norm);
    Err(NewtonError::NotConverged {
        iterations: stats.iterations,
        best_residual: best_norm,
        best,
        stats,
    })
}
