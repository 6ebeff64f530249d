//! Discrete conservation diagnostics.

use crate::cell::{energy_constraint, CellContext, CellEdges, LevelData};
use crate::model::{energy_density, momentum_density, momentum_flux, Potential};

/// h Σ_j Σ_i b_i E(z_ji)
pub fn global_energy(level: &LevelData, h: f64, b: &[f64], p: &Potential) -> f64 {
    let mut sum = 0.0;
    for j in 0..level.cells() {
        for (i, bi) in b.iter().enumerate() {
            sum += bi * energy_density(level.state(j, i), p);
        }
    }
    h * sum
}

/// h Σ_j Σ_i b_i I(z_ji) with I = -vw.
pub fn global_momentum(level: &LevelData, h: f64, b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for j in 0..level.cells() {
        for (i, bi) in b.iter().enumerate() {
            sum += bi * momentum_density(level.state(j, i));
        }
    }
    h * sum
}

/// Discrete energy conservation law residual of one cell.
pub fn local_ecl_residual(edges: &CellEdges, ctx: &CellContext) -> f64 {
    energy_constraint(edges, ctx)
}

/// h Σ b_i (I¹_i - I⁰_i) + τ Σ b̃_m (G^m_1 - G^m_0), never constrained.
pub fn local_mcl_residual(edges: &CellEdges, ctx: &CellContext) -> f64 {
    let p = &ctx.potential;
    let mut space = 0.0;
    for i in 0..edges.top.len() {
        space += ctx.b[i] * (momentum_density(edges.top[i]) - momentum_density(edges.bottom[i]));
    }
    let mut time = 0.0;
    for m in 0..edges.left.len() {
        time += ctx.bt[m] * (momentum_flux(edges.right[m], p) - momentum_flux(edges.left[m], p));
    }
    ctx.h * space + ctx.tau * time
}

/// Per-level record of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldHistory {
    pub times: Vec<f64>,
    /// One entry per time level, including t = 0.
    pub energy_series: Vec<f64>,
    pub momentum_series: Vec<f64>,
    /// α per cell for each step (rows are steps).
    pub alpha_field: Vec<Vec<f64>>,
    pub local_ecl_residuals: Vec<Vec<f64>>,
    pub local_mcl_residuals: Vec<Vec<f64>>,
    /// (t, u at the left cell corners)
    pub snapshots: Vec<(f64, Vec<f64>)>,
}

impl FieldHistory {
    pub fn max_energy_drift(&self) -> f64 {
        drift(&self.energy_series)
    }

    pub fn max_momentum_drift(&self) -> f64 {
        drift(&self.momentum_series)
    }

    pub fn max_abs_alpha(&self) -> f64 {
        self.alpha_field
            .iter()
            .flatten()
            .fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn max_abs_ecl(&self) -> f64 {
        self.local_ecl_residuals
            .iter()
            .flatten()
            .fold(0.0, |m, a| m.max(a.abs()))
    }
}

fn drift(series: &[f64]) -> f64 {
    let Some(&first) = series.first() else {
        return 0.0;
    };
    series.iter().fold(0.0, |m, e| m.max((e - first).abs()))
}
