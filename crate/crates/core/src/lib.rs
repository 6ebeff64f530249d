//! Parametric multi-symplectic Runge-Kutta methods for the wave equation
//! u_tt - u_xx + V'(u) = 0 on a periodic domain.
//!
//! Each space-time cell carries its own parameter α. The α-RK tableaux stay
//! multi-symplectic for every α, and α is solved for so that the discrete energy
//! conservation law of the cell holds.

pub mod assembly;
pub mod band;
pub mod cell;
pub mod diagnostics;
pub mod experiment;
pub mod integrator;
pub mod model;
pub mod newton;
pub mod tableau;

pub use assembly::{GridSpec, TimeLevelSystem};
pub use band::{band_lu_solve, BandMatrix, SolverError};
pub use cell::{CellContext, CellLayout, LevelData, Mode};
pub use experiment::{ExperimentConfig, RunOutput};
pub use integrator::{Projection, Stepper};
pub use model::{InitialData, Potential, WaveState};
pub use newton::{cost_estimate, newton_solve, NewtonOptions, SolveStats};
pub use tableau::{gauss_tableau, AlphaRkFamily, ButcherTableau};
