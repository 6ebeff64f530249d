//! Time stepping: one Newton solve per time level.

use crate::assembly::{GridSpec, TimeLevelSystem};
use crate::cell::{CellContext, CellEdges, CellLayout, LevelData, Mode};
use crate::model::InitialData;
use crate::newton::{newton_solve, NewtonError, NewtonOptions, SolveStats};
use serde::{Deserialize, Serialize};

/// How the initial level is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// w = ∂_x u0 at the stage abscissae (shifted to zero mean); u is then integrated from w
    /// with the spatial RK relations, so corners and stages agree with the scheme.
    #[default]
    Consistent,
    /// u, v, w sampled from the profile at the stage abscissae.
    Analytic,
}

/// Bottom data of level 0.
pub fn initial_level(init: &InitialData, grid: &GridSpec, ctx: &CellContext, proj: Projection) -> LevelData {
    let s = ctx.s();
    let h = grid.h;
    let mut level = LevelData::zeros(grid.m, s);
    for j in 0..grid.m {
        let x0 = grid.x(j);
        level.u00[j] = init.u0(x0);
        for i in 0..s {
            let z = init.state(x0 + ctx.c[i] * h, 0.0);
            level.u[j * s + i] = z.u;
            level.v[j * s + i] = z.v;
            level.w[j * s + i] = z.w;
        }
    }
    if proj == Projection::Consistent {
        let mut mean = 0.0;
        for j in 0..grid.m {
            for i in 0..s {
                mean += h * ctx.b[i] * level.w[j * s + i];
            }
        }
        mean /= grid.l;
        level.w.iter_mut().for_each(|w| *w -= mean);
        let mut corner = level.u00[0];
        for j in 0..grid.m {
            level.u00[j] = corner;
            let w = &level.w[j * s..(j + 1) * s];
            let mut bw = 0.0;
            for i in 0..s {
                let aw: f64 = (0..s).map(|k| ctx.a[(i, k)] * w[k]).sum();
                level.u[j * s + i] = corner + h * aw;
                bw += ctx.b[i] * w[i];
            }
            corner += h * bw;
        }
    }
    level
}

/// Unknowns of the zero-mode system extended constantly in time from the bottom data.
pub fn constant_guess(ctx: &CellContext, level: &LevelData) -> Vec<f64> {
    let lay = CellLayout::new(ctx.s(), ctx.r(), Mode::Zero);
    let n = lay.dim();
    let mut x = vec![0.0; n * level.cells()];
    for j in 0..level.cells() {
        let inp = level.inputs(j);
        let y = &mut x[j * n..(j + 1) * n];
        for m in 0..lay.r {
            y[lay.u0m(m)] = inp.u00;
            y[lay.w0m(m)] = inp.w0[0];
        }
        for i in 0..lay.s {
            for m in 0..lay.r {
                y[lay.u(i, m)] = inp.u0[i];
                y[lay.v(i, m)] = inp.v0[i];
                y[lay.w(i, m)] = inp.w0[i];
                y[lay.dxw(i, m)] = ctx.potential.derivative(inp.u0[i]);
            }
        }
    }
    x
}

/// Default α-column size below which a cell keeps α = 0.
pub const DEFAULT_FREEZE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Stepper {
    pub ctx: CellContext,
    pub mode: Mode,
    pub newton: NewtonOptions,
    /// Cells whose α column is smaller than this keep α = 0 (their energy law is then
    /// satisfied to roundoff by the zero-mode scheme already).
    pub freeze_threshold: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub next: LevelData,
    /// α-mode unknowns of every cell.
    pub solution: Vec<f64>,
    pub alpha: Vec<f64>,
    pub frozen: Vec<bool>,
    pub predictor: SolveStats,
    pub corrector: Option<SolveStats>,
    /// Warm start for the next level's predictor.
    pub warm: Vec<f64>,
}

impl StepOutput {
    pub fn iterations(&self) -> usize {
        self.predictor.iterations + self.corrector.as_ref().map_or(0, |c| c.iterations)
    }

    pub fn wall_time(&self) -> f64 {
        self.predictor.wall_time + self.corrector.as_ref().map_or(0.0, |c| c.wall_time)
    }

    pub fn flop_estimate(&self) -> f64 {
        self.predictor.flop_estimate + self.corrector.as_ref().map_or(0.0, |c| c.flop_estimate)
    }

    pub fn measured_flops(&self) -> u64 {
        self.predictor.measured_flops + self.corrector.as_ref().map_or(0, |c| c.measured_flops)
    }

    pub fn final_residual(&self) -> f64 {
        self.corrector.as_ref().unwrap_or(&self.predictor).final_residual
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StepError {
    #[error("zero-mode solve failed: {0}")]
    Predictor(NewtonError),
    #[error("alpha-mode solve failed: {0}")]
    Corrector(NewtonError),
}

impl Stepper {
    pub fn new(ctx: CellContext, mode: Mode, newton: NewtonOptions) -> Self {
        Self {
            ctx,
            mode,
            newton,
            freeze_threshold: DEFAULT_FREEZE_THRESHOLD,
        }
    }

    pub fn alpha_layout(&self) -> CellLayout {
        CellLayout::new(self.ctx.s(), self.ctx.r(), Mode::Alpha)
    }

    pub fn zero_layout(&self) -> CellLayout {
        CellLayout::new(self.ctx.s(), self.ctx.r(), Mode::Zero)
    }

    /// Advance one level. The zero-mode solution is computed first; in α-mode it seeds the
    /// augmented solve with α = 0.
    pub fn step(&self, level: &LevelData, warm: Option<&[f64]>) -> Result<StepOutput, StepError> {
        let (za, zl) = (self.alpha_layout(), self.zero_layout());
        let (na, nz, m) = (za.dim(), zl.dim(), level.cells());
        let guess = match warm {
            Some(w) => w.to_vec(),
            None => constant_guess(&self.ctx, level),
        };
        let sys0 = TimeLevelSystem::new(&self.ctx, Mode::Zero, level);
        let (xz, predictor) = newton_solve(&sys0, &guess, &self.newton).map_err(StepError::Predictor)?;
        let mut xa = vec![0.0; na * m];
        for j in 0..m {
            let lifted = self.ctx.lift(&zl, &level.inputs(j), &xz[j * nz..(j + 1) * nz], &za);
            xa[j * na..(j + 1) * na].copy_from_slice(&lifted);
        }
        let mut frozen = vec![true; m];
        let mut corrector = None;
        if self.mode == Mode::Alpha {
            let mut sys = TimeLevelSystem::new(&self.ctx, Mode::Alpha, level);
            for j in 0..m {
                frozen[j] = self.ctx.alpha_sensitivity(&za, &xa[j * na..(j + 1) * na]) < self.freeze_threshold;
            }
            sys.frozen = frozen.clone();
            let (x, stats) = newton_solve(&sys, &xa, &self.newton).map_err(StepError::Corrector)?;
            xa = x;
            corrector = Some(stats);
        }
        let ka = za.alpha().expect("alpha layout");
        let alpha = (0..m).map(|j| xa[j * na + ka]).collect();
        let next = self.next_level(&xa, m);
        let mut warm = vec![0.0; nz * m];
        for j in 0..m {
            let r = self.ctx.restrict(&za, &xa[j * na..(j + 1) * na], &zl);
            warm[j * nz..(j + 1) * nz].copy_from_slice(&r);
        }
        Ok(StepOutput {
            next,
            solution: xa,
            alpha,
            frozen,
            predictor,
            corrector,
            warm,
        })
    }

    fn next_level(&self, xa: &[f64], m: usize) -> LevelData {
        let za = self.alpha_layout();
        let (s, na) = (za.s, za.dim());
        let mut out = LevelData::zeros(m, s);
        for j in 0..m {
            let x = &xa[j * na..(j + 1) * na];
            for i in 0..s {
                out.u[j * s + i] = x[za.u1(i)];
                out.v[j * s + i] = x[za.v1(i)];
                out.w[j * s + i] = x[za.w1(i)];
            }
            out.u00[j] = x[za.u10()];
        }
        out
    }

    /// Edges of every cell of a solved level.
    pub fn edges(&self, level: &LevelData, out: &StepOutput) -> Vec<CellEdges> {
        let za = self.alpha_layout();
        let (na, m) = (za.dim(), level.cells());
        let x = &out.solution;
        (0..m)
            .map(|j| {
                let jn = (j + 1) % m;
                self.ctx.edges(
                    &za,
                    &level.inputs(j),
                    &x[j * na..(j + 1) * na],
                    &x[jn * na..(jn + 1) * na],
                )
            })
            .collect()
    }
}
