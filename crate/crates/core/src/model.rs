//! The wave equation u_tt - u_xx + V'(u) = 0 as a first-order Hamiltonian system.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown potential '{0}' (expected 'sine-gordon' or 'quadratic')")]
    UnknownPotential(String),
    #[error("soliton speed must satisfy |beta| < 1, got {0}")]
    Speed(f64),
    #[error("domain length must be positive, got {0}")]
    Length(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Potential {
    /// V(u) = -cos u
    SineGordon,
    /// V(u) = ω² u² / 2
    Quadratic { omega: f64 },
}

impl Potential {
    pub fn from_name(name: &str, omega: f64) -> Result<Self, ModelError> {
        match name {
            "sine-gordon" => Ok(Self::SineGordon),
            "quadratic" => Ok(Self::Quadratic { omega }),
            other => Err(ModelError::UnknownPotential(other.to_string())),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::SineGordon => "sine-gordon",
            Self::Quadratic { .. } => "quadratic",
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, Self::Quadratic { .. })
    }

    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Self::SineGordon => -u.cos(),
            Self::Quadratic { omega } => 0.5 * omega * omega * u * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Self::SineGordon => u.sin(),
            Self::Quadratic { omega } => omega * omega * u,
        }
    }

    pub fn second_derivative(&self, u: f64) -> f64 {
        match *self {
            Self::SineGordon => u.cos(),
            Self::Quadratic { omega } => omega * omega,
        }
    }
}

/// z = (u, v, w) with v = ∂_t u and w = ∂_x u.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WaveState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl WaveState {
    pub fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }
}

pub fn energy_density(z: WaveState, p: &Potential) -> f64 {
    0.5 * (z.w * z.w + z.v * z.v) + p.value(z.u)
}

pub fn energy_flux(z: WaveState) -> f64 {
    -z.v * z.w
}

pub fn momentum_density(z: WaveState) -> f64 {
    -z.v * z.w
}

pub fn momentum_flux(z: WaveState, p: &Potential) -> f64 {
    0.5 * (z.w * z.w + z.v * z.v) - p.value(z.u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// Kink at L/6 and antikink at -L/6, moving apart with speed β.
    SolitonPair { beta: f64 },
    /// a sin(kx) cos(Ωt), k = 2π·mode/L, Ω² = k² + ω²; exact for the quadratic potential.
    StandingWave { mode: u32, amplitude: f64, omega: f64 },
}

/// Initial data on the periodic domain [-L/2, L/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub profile: Profile,
    pub domain_length: f64,
}

impl InitialData {
    pub fn soliton_antisoliton(beta: f64, l: f64) -> Result<Self, ModelError> {
        if !(beta.abs() < 1.0) {
            return Err(ModelError::Speed(beta));
        }
        if !(l > 0.0) {
            return Err(ModelError::Length(l));
        }
        Ok(Self {
            profile: Profile::SolitonPair { beta },
            domain_length: l,
        })
    }

    pub fn standing_wave(mode: u32, amplitude: f64, omega: f64, l: f64) -> Result<Self, ModelError> {
        if !(l > 0.0) {
            return Err(ModelError::Length(l));
        }
        Ok(Self {
            profile: Profile::StandingWave {
                mode,
                amplitude,
                omega,
            },
            domain_length: l,
        })
    }

    /// The profile evaluated at (x, t).
    pub fn state(&self, x: f64, t: f64) -> WaveState {
        let l = self.domain_length;
        match self.profile {
            Profile::SolitonPair { beta } => {
                let g = (1.0 - beta * beta).sqrt();
                let e1 = (x - l / 6.0 - beta * t).exp() / g;
                let e2 = (-x - l / 6.0 - beta * t).exp() / g;
                let d1 = 4.0 * e1 / (1.0 + e1 * e1);
                let d2 = 4.0 * e2 / (1.0 + e2 * e2);
                WaveState {
                    u: 4.0 * e1.atan() + 4.0 * e2.atan(),
                    v: -beta * (d1 + d2),
                    w: d1 - d2,
                }
            }
            Profile::StandingWave {
                mode,
                amplitude,
                omega,
            } => {
                let k = 2.0 * PI * mode as f64 / l;
                let big = (k * k + omega * omega).sqrt();
                let (sx, cx) = (k * x).sin_cos();
                let (st, ct) = (big * t).sin_cos();
                WaveState {
                    u: amplitude * sx * ct,
                    v: -amplitude * big * sx * st,
                    w: amplitude * k * cx * ct,
                }
            }
        }
    }

    pub fn u0(&self, x: f64) -> f64 {
        self.state(x, 0.0).u
    }

    pub fn v0(&self, x: f64) -> f64 {
        self.state(x, 0.0).v
    }

    pub fn w0(&self, x: f64) -> f64 {
        self.state(x, 0.0).w
    }

    /// True when `state` solves the equation for `potential` exactly.
    pub fn is_exact_for(&self, potential: &Potential) -> bool {
        match (self.profile, potential) {
            (Profile::StandingWave { omega, .. }, Potential::Quadratic { omega: w }) => omega == *w,
            _ => false,
        }
    }
}
