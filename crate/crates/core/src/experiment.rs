//! Configured runs over a whole time interval, with diagnostics and CSV output.

use crate::assembly::{GridError, GridSpec};
use crate::cell::{CellContext, LevelData, Mode};
use crate::diagnostics::{global_energy, global_momentum, local_ecl_residual, local_mcl_residual, FieldHistory};
use crate::integrator::{initial_level, Projection, Stepper, DEFAULT_FREEZE_THRESHOLD};
use crate::model::{InitialData, ModelError, Potential, Profile};
use crate::newton::NewtonOptions;
use crate::tableau::{gauss_tableau, AlphaRkFamily, PerturbationPattern, PerturbedTableau, TableauError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("{0}")]
    Invalid(String),
}

/// Everything a run needs. Missing JSON fields take the defaults, which describe the
/// sine-Gordon soliton pair on L = 100 up to T = 20 with Δx = 1, Δt = 0.1, s = 2, r = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: Potential,
    pub profile: Profile,
    #[serde(rename = "L")]
    pub domain_length: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dx: f64,
    pub dt: f64,
    pub s: usize,
    pub r: usize,
    pub mode: Mode,
    pub newton: NewtonOptions,
    pub freeze_threshold: f64,
    pub projection: Projection,
    /// 0-based (p, q) of the spatial perturbation; the default is (s-1, 0).
    pub placement: Option<[usize; 2]>,
    /// Empty means 0, T/4, T/2, 3T/4 and T.
    pub snapshot_times: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: Potential::SineGordon,
            profile: Profile::SolitonPair { beta: 0.5 },
            domain_length: 100.0,
            t_final: 20.0,
            dx: 1.0,
            dt: 0.1,
            s: 2,
            r: 1,
            mode: Mode::Alpha,
            newton: NewtonOptions::default(),
            freeze_threshold: DEFAULT_FREEZE_THRESHOLD,
            projection: Projection::Consistent,
            placement: None,
            snapshot_times: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        Ok(GridSpec::new(self.domain_length, self.dx, self.dt, self.t_final)?)
    }

    pub fn initial_data(&self) -> Result<InitialData, ConfigError> {
        Ok(match self.profile {
            Profile::SolitonPair { beta } => InitialData::soliton_antisoliton(beta, self.domain_length)?,
            Profile::StandingWave {
                mode,
                amplitude,
                omega,
            } => InitialData::standing_wave(mode, amplitude, omega, self.domain_length)?,
        })
    }

    pub fn family(&self) -> Result<AlphaRkFamily, ConfigError> {
        let spatial = match self.placement {
            None => PerturbationPattern::default_for(self.s),
            Some([p, q]) => PerturbationPattern::new(self.s, p, q)?,
        };
        Ok(AlphaRkFamily::new(
            PerturbedTableau::new(gauss_tableau(self.s)?, spatial)?,
            PerturbedTableau::new(gauss_tableau(self.r)?, PerturbationPattern::default_for(self.r))?,
        ))
    }

    /// Check everything that can be checked without running.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        self.initial_data()?;
        self.family()?;
        if !(self.newton.tol > 0.0) || self.newton.maxit == 0 {
            return Err(ConfigError::Invalid("Newton tolerance and iteration cap must be positive".into()));
        }
        if !(self.freeze_threshold >= 0.0) {
            return Err(ConfigError::Invalid("freeze_threshold must be non-negative".into()));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_final)) {
            return Err(ConfigError::Invalid(format!("snapshot time {t} outside [0, T]")));
        }
        Ok(())
    }
}

/// Per-step solver record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub predictor_iterations: usize,
    pub corrector_iterations: usize,
    pub final_residual: f64,
    pub wall_time: f64,
    pub flop_estimate: f64,
    pub measured_flops: u64,
    pub frozen_cells: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub grid: GridSpec,
    pub history: FieldHistory,
    pub steps: Vec<StepRecord>,
    /// Stage abscissae x_j + c_i h, in storage order.
    pub stage_x: Vec<f64>,
    pub final_level: LevelData,
    /// Set when a time level could not be solved; the history stops before it.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub steps_requested: usize,
    pub steps_completed: usize,
    pub max_energy_drift: f64,
    pub max_momentum_drift: f64,
    pub max_abs_alpha: f64,
    pub max_abs_ecl: f64,
    pub max_abs_mcl: f64,
    pub newton_iterations: usize,
    pub total_wall_time: f64,
    pub flop_estimate: f64,
    pub measured_flops: u64,
    pub failure: Option<String>,
}

impl RunOutput {
    pub fn summary(&self) -> RunSummary {
        let h = &self.history;
        RunSummary {
            mode: self.config.mode,
            steps_requested: self.grid.steps,
            steps_completed: self.steps.len(),
            max_energy_drift: h.max_energy_drift(),
            max_momentum_drift: h.max_momentum_drift(),
            max_abs_alpha: h.max_abs_alpha(),
            max_abs_ecl: h.max_abs_ecl(),
            max_abs_mcl: h.local_mcl_residuals.iter().flatten().fold(0.0, |m, a| m.max(a.abs())),
            newton_iterations: self.steps.iter().map(|s| s.predictor_iterations + s.corrector_iterations).sum(),
            total_wall_time: self.steps.iter().map(|s| s.wall_time).sum(),
            flop_estimate: self.steps.iter().map(|s| s.flop_estimate).sum(),
            measured_flops: self.steps.iter().map(|s| s.measured_flops).sum(),
            failure: self.failure.clone(),
        }
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

fn snapshot_steps(cfg: &ExperimentConfig, grid: &GridSpec) -> Vec<usize> {
    let mut steps: Vec<usize> = if cfg.snapshot_times.is_empty() {
        // quarters of [0, T]
        (0..=4).map(|q| (q * grid.steps + 2) / 4).collect()
    } else {
        cfg.snapshot_times.iter().map(|t| (t / grid.tau).round() as usize).collect()
    };
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Integrate from t = 0 to T. Configuration problems are errors; a level that fails to
/// converge ends the run early and is reported in `failure`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, ConfigError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let init = cfg.initial_data()?;
    let family = cfg.family()?;
    let ctx = CellContext::new(&family, grid.h, grid.tau, cfg.potential);
    let mut stepper = Stepper::new(ctx.clone(), cfg.mode, cfg.newton);
    stepper.freeze_threshold = cfg.freeze_threshold;

    let stage_x: Vec<f64> = (0..grid.m)
        .flat_map(|j| ctx.c.iter().map(move |c| grid.x(j) + c * grid.h))
        .collect();
    let snaps = snapshot_steps(cfg, &grid);
    let mut level = initial_level(&init, &grid, &ctx, cfg.projection);
    let mut history = FieldHistory::default();
    let record_level = |history: &mut FieldHistory, level: &LevelData, k: usize| {
        let t = k as f64 * grid.tau;
        history.times.push(t);
        history.energy_series.push(global_energy(level, grid.h, &ctx.b, &cfg.potential));
        history.momentum_series.push(global_momentum(level, grid.h, &ctx.b));
        if snaps.binary_search(&k).is_ok() {
            history.snapshots.push((t, level.u.clone()));
        }
    };
    record_level(&mut history, &level, 0);

    let mut steps = Vec::with_capacity(grid.steps);
    let mut warm: Option<Vec<f64>> = None;
    let mut failure = None;
    for k in 0..grid.steps {
        let start = Instant::now();
        let out = match stepper.step(&level, warm.as_deref()) {
            Ok(out) => out,
            Err(e) => {
                failure = Some(format!("step {k} (t = {:.4}): {e}", k as f64 * grid.tau));
                break;
            }
        };
        let edges = stepper.edges(&level, &out);
        history.alpha_field.push(out.alpha.clone());
        history.local_ecl_residuals.push(edges.iter().map(|e| local_ecl_residual(e, &ctx)).collect());
        history.local_mcl_residuals.push(edges.iter().map(|e| local_mcl_residual(e, &ctx)).collect());
        steps.push(StepRecord {
            step: k,
            t: k as f64 * grid.tau,
            predictor_iterations: out.predictor.iterations,
            corrector_iterations: out.corrector.as_ref().map_or(0, |c| c.iterations),
            final_residual: out.final_residual(),
            wall_time: start.elapsed().as_secs_f64(),
            flop_estimate: out.flop_estimate(),
            measured_flops: out.measured_flops(),
            frozen_cells: out.frozen.iter().filter(|f| **f).count(),
        });
        level = out.next;
        warm = Some(out.warm);
        record_level(&mut history, &level, k + 1);
    }
    Ok(RunOutput {
        config: cfg.clone(),
        grid,
        history,
        steps,
        stage_x,
        final_level: level,
        failure,
    })
}

/// The same configuration in both modes.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub alpha: RunOutput,
    pub zero: RunOutput,
}

impl Comparison {
    /// Total wall time of the α-mode run over the zero-mode run, on the steps both completed.
    pub fn wall_time_ratio(&self) -> f64 {
        let n = self.alpha.steps.len().min(self.zero.steps.len());
        let time = |r: &RunOutput| r.steps[..n].iter().map(|s| s.wall_time).sum::<f64>();
        time(&self.alpha) / time(&self.zero)
    }

    /// Zero-mode energy drift over α-mode energy drift.
    pub fn drift_ratio(&self) -> f64 {
        self.zero.history.max_energy_drift() / self.alpha.history.max_energy_drift()
    }
}

pub fn compare(cfg: &ExperimentConfig) -> Result<Comparison, ConfigError> {
    let with = |mode| ExperimentConfig { mode, ..cfg.clone() };
    Ok(Comparison {
        zero: run(&with(Mode::Zero))?,
        alpha: run(&with(Mode::Alpha))?,
    })
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct Manifest<'a> {
    crate_version: &'static str,
    config: &'a ExperimentConfig,
    cells: usize,
    steps: usize,
    unknowns_per_cell: usize,
    summary: RunSummary,
}

/// Write the run's CSV files and `run_manifest.json` into `dir`, creating it if needed.
pub fn write_artifacts(out: &RunOutput, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let h = &out.history;
    let (grid, tau) = (&out.grid, out.grid.tau);
    let e0 = h.energy_series.first().copied().unwrap_or(0.0);
    let i0 = h.momentum_series.first().copied().unwrap_or(0.0);
    write_csv(
        &dir.join("energy_series.csv"),
        &["t", "energy", "drift"],
        h.times.iter().zip(&h.energy_series).map(|(t, e)| (t, e, e - e0)),
    )?;
    write_csv(
        &dir.join("momentum_series.csv"),
        &["t", "momentum", "drift"],
        h.times.iter().zip(&h.momentum_series).map(|(t, m)| (t, m, m - i0)),
    )?;
    let centre = |k: usize, j: usize| (grid.x(j) + 0.5 * grid.h, (k as f64 + 0.5) * tau);
    write_csv(
        &dir.join("alpha_field.csv"),
        &["x", "t", "alpha"],
        h.alpha_field.iter().enumerate().flat_map(|(k, row)| {
            row.iter().enumerate().map(move |(j, a)| {
                let (x, t) = centre(k, j);
                (x, t, *a)
            })
        }),
    )?;
    write_csv(
        &dir.join("local_ecl.csv"),
        &["x", "t", "ecl", "mcl"],
        h.local_ecl_residuals
            .iter()
            .zip(&h.local_mcl_residuals)
            .enumerate()
            .flat_map(|(k, (ecl, mcl))| {
                ecl.iter().zip(mcl).enumerate().map(move |(j, (e, m))| {
                    let (x, t) = centre(k, j);
                    (x, t, *e, *m)
                })
            }),
    )?;
    write_csv(
        &dir.join("snapshots.csv"),
        &["t", "x", "u"],
        h.snapshots
            .iter()
            .flat_map(|(t, u)| out.stage_x.iter().zip(u).map(move |(x, u)| (*t, *x, *u))),
    )?;
    write_csv(
        &dir.join("stats.csv"),
        &[
            "step",
            "t",
            "predictor_iterations",
            "corrector_iterations",
            "final_residual",
            "wall_time",
            "flop_estimate",
            "measured_flops",
            "frozen_cells",
        ],
        &out.steps,
    )?;
    let layout = crate::cell::CellLayout::new(out.config.s, out.config.r, out.config.mode);
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION"),
        config: &out.config,
        cells: grid.m,
        steps: grid.steps,
        unknowns_per_cell: layout.dim(),
        summary: out.summary(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("run_manifest.json"), json + "\n")
}

/// Plain-text table of a comparison.
pub fn comparison_report(c: &Comparison) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<6} {:>6} {:>14} {:>14} {:>12} {:>10}\n",
        "mode", "steps", "energy_drift", "momentum_drift", "max_alpha", "wall_s"
    ));
    for r in [&c.zero, &c.alpha] {
        let m = r.summary();
        let name = match m.mode {
            Mode::Alpha => "alpha",
            Mode::Zero => "zero",
        };
        s.push_str(&format!(
            "{:<6} {:>6} {:>14.3e} {:>14.3e} {:>12.3e} {:>10.3}\n",
            name, m.steps_completed, m.max_energy_drift, m.max_momentum_drift, m.max_abs_alpha, m.total_wall_time
        ));
        if let Some(f) = &m.failure {
            s.push_str(&format!("  {name} stopped at {f}\n"));
        }
    }
    s.push_str(&format!("wall-time ratio alpha/zero: {:.3}\n", c.wall_time_ratio()));
    s.push_str(&format!("energy drift ratio zero/alpha: {:.3e}\n", c.drift_ratio()));
    s
}

/// Write the comparison table (`summary.txt`, `summary.csv`) and both runs' artifacts
/// into `alpha/` and `zero/` below `dir`.
pub fn write_comparison(c: &Comparison, dir: &Path) -> std::io::Result<()> {
    write_artifacts(&c.alpha, &dir.join("alpha"))?;
    write_artifacts(&c.zero, &dir.join("zero"))?;
    std::fs::write(dir.join("summary.txt"), comparison_report(c))?;
    write_csv(
        &dir.join("summary.csv"),
        &[
            "mode",
            "steps_requested",
            "steps_completed",
            "max_energy_drift",
            "max_momentum_drift",
            "max_abs_alpha",
            "max_abs_ecl",
            "max_abs_mcl",
            "newton_iterations",
            "total_wall_time",
            "flop_estimate",
            "measured_flops",
            "failure",
        ],
        [c.zero.summary(), c.alpha.summary()],
    )
}
