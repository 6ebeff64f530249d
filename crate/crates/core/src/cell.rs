//! Residual and Jacobian of one space-time cell.
//!
//! Unknowns of a cell, in order (α-mode):
//! `[v0m(r), w0m(r), u0m(r), U(sr), V(sr), W(sr), dtV(sr), dxW(sr), u1(s), v1(s), w1(s), u10, α]`.
//! The zero mode keeps `[w0m(r), u0m(r), U, V, W, dtV, dxW]`. Stage (i, m) is stored at `i * r + m`.
//!
//! Residual rows: spatial stages, temporal stages, stage PDE, coupling to the next cell,
//! then (α-mode) top outputs, closures and the energy constraint.

use crate::model::{energy_density, energy_flux, Potential, WaveState};
use crate::tableau::AlphaRkFamily;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// α is an unknown per cell and the discrete energy law is enforced.
    Alpha,
    /// Plain multi-symplectic scheme, α ≡ 0.
    Zero,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha" => Ok(Mode::Alpha),
            "zero" => Ok(Mode::Zero),
            other => Err(format!("unknown mode '{other}' (expected 'alpha' or 'zero')")),
        }
    }
}

/// Index map of a cell's unknowns and residual rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellLayout {
    pub s: usize,
    pub r: usize,
    pub mode: Mode,
}

impl CellLayout {
    pub fn new(s: usize, r: usize, mode: Mode) -> Self {
        Self { s, r, mode }
    }

    /// (5s+3)r + 3s + 2 in α-mode, (5s+2)r otherwise.
    pub fn dim(&self) -> usize {
        let (s, r) = (self.s, self.r);
        match self.mode {
            Mode::Alpha => (5 * s + 3) * r + 3 * s + 2,
            Mode::Zero => (5 * s + 2) * r,
        }
    }

    pub fn is_alpha(&self) -> bool {
        self.mode == Mode::Alpha
    }

    fn trace_base(&self) -> usize {
        if self.is_alpha() {
            self.r
        } else {
            0
        }
    }

    pub fn v0m(&self, m: usize) -> Option<usize> {
        self.is_alpha().then_some(m)
    }

    pub fn w0m(&self, m: usize) -> usize {
        self.trace_base() + m
    }

    pub fn u0m(&self, m: usize) -> usize {
        self.trace_base() + self.r + m
    }

    /// Number of leading trace unknowns shared with the previous cell.
    pub fn trace_count(&self) -> usize {
        self.trace_base() + 2 * self.r
    }

    fn stage(&self, block: usize, i: usize, m: usize) -> usize {
        self.trace_count() + block * self.s * self.r + i * self.r + m
    }

    pub fn u(&self, i: usize, m: usize) -> usize {
        self.stage(0, i, m)
    }
    pub fn v(&self, i: usize, m: usize) -> usize {
        self.stage(1, i, m)
    }
    pub fn w(&self, i: usize, m: usize) -> usize {
        self.stage(2, i, m)
    }
    pub fn dtv(&self, i: usize, m: usize) -> usize {
        self.stage(3, i, m)
    }
    pub fn dxw(&self, i: usize, m: usize) -> usize {
        self.stage(4, i, m)
    }

    fn top_base(&self) -> usize {
        debug_assert!(self.is_alpha());
        self.trace_count() + 5 * self.s * self.r
    }
    pub fn u1(&self, i: usize) -> usize {
        self.top_base() + i
    }
    pub fn v1(&self, i: usize) -> usize {
        self.top_base() + self.s + i
    }
    pub fn w1(&self, i: usize) -> usize {
        self.top_base() + 2 * self.s + i
    }
    pub fn u10(&self) -> usize {
        self.top_base() + 3 * self.s
    }
    pub fn alpha(&self) -> Option<usize> {
        self.is_alpha().then(|| self.top_base() + 3 * self.s + 1)
    }

    /// Row index of the energy constraint (α-mode only).
    pub fn energy_row(&self) -> Option<usize> {
        self.is_alpha().then(|| self.dim() - 1)
    }

    /// Rows that reference unknowns of the next cell.
    pub fn couples_to_next(&self, row: usize) -> bool {
        let sr = self.s * self.r;
        (5 * sr..5 * sr + 2 * self.r).contains(&row) || Some(row) == self.energy_row()
    }
}

/// Bottom-edge data of every cell of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelData {
    pub s: usize,
    /// Stage values at x_j + c_i h, stored at `j * s + i`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// u at the left corner x_j of each cell.
    pub u00: Vec<f64>,
}

impl LevelData {
    pub fn zeros(cells: usize, s: usize) -> Self {
        Self {
            s,
            u: vec![0.0; cells * s],
            v: vec![0.0; cells * s],
            w: vec![0.0; cells * s],
            u00: vec![0.0; cells],
        }
    }

    pub fn cells(&self) -> usize {
        self.u00.len()
    }

    pub fn inputs(&self, j: usize) -> CellInputs<'_> {
        let rg = j * self.s..(j + 1) * self.s;
        CellInputs {
            u0: &self.u[rg.clone()],
            v0: &self.v[rg.clone()],
            w0: &self.w[rg],
            u00: self.u00[j],
        }
    }

    pub fn state(&self, j: usize, i: usize) -> WaveState {
        let k = j * self.s + i;
        WaveState::new(self.u[k], self.v[k], self.w[k])
    }
}

/// Bottom-edge inputs of one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellInputs<'a> {
    pub u0: &'a [f64],
    pub v0: &'a [f64],
    pub w0: &'a [f64],
    pub u00: f64,
}

/// How the last row of an α-mode cell is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyRow {
    /// Discrete energy conservation law.
    Constraint,
    /// α pinned to zero.
    Frozen,
}

/// Tableau data, step sizes and potential shared by all cells.
#[derive(Debug, Clone)]
pub struct CellContext {
    pub a: DMatrix<f64>,
    pub da: DMatrix<f64>,
    pub at: DMatrix<f64>,
    pub dat: DMatrix<f64>,
    pub b: Vec<f64>,
    pub bt: Vec<f64>,
    /// Spatial abscissae.
    pub c: Vec<f64>,
    a_inv: DMatrix<f64>,
    at_inv: DMatrix<f64>,
    pub h: f64,
    pub tau: f64,
    pub potential: Potential,
}

impl CellContext {
    pub fn new(family: &AlphaRkFamily, h: f64, tau: f64, potential: Potential) -> Self {
        let a = family.spatial.base.a.clone();
        let at = family.temporal.base.a.clone();
        Self {
            a_inv: a.clone().try_inverse().expect("Gauss A is invertible"),
            at_inv: at.clone().try_inverse().expect("Gauss A is invertible"),
            a,
            da: family.spatial.derivative.clone(),
            at,
            dat: family.temporal.derivative.clone(),
            b: family.spatial.base.b.iter().copied().collect(),
            bt: family.temporal.base.b.iter().copied().collect(),
            c: family.spatial.base.c.iter().copied().collect(),
            h,
            tau,
            potential,
        }
    }

    pub fn s(&self) -> usize {
        self.b.len()
    }

    pub fn r(&self) -> usize {
        self.bt.len()
    }

    fn a_alpha(&self, alpha: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        if alpha == 0.0 {
            (self.a.clone(), self.at.clone())
        } else {
            (&self.a + &self.da * alpha, &self.at + &self.dat * alpha)
        }
    }

    /// Residual of cell `x` given the next cell's unknowns `next`.
    pub fn residual(
        &self,
        lay: &CellLayout,
        inp: &CellInputs,
        x: &[f64],
        next: &[f64],
        row: EnergyRow,
        out: &mut [f64],
    ) {
        let (s, r, h, tau) = (lay.s, lay.r, self.h, self.tau);
        let sr = s * r;
        let alpha = lay.alpha().map_or(0.0, |k| x[k]);
        let (aa, ata) = self.a_alpha(alpha);
        for i in 0..s {
            for m in 0..r {
                let k = i * r + m;
                let (mut sw, mut sdxw) = (0.0, 0.0);
                for j in 0..s {
                    sw += aa[(i, j)] * x[lay.w(j, m)];
                    sdxw += aa[(i, j)] * x[lay.dxw(j, m)];
                }
                let (mut sv, mut sdtv) = (0.0, 0.0);
                for n in 0..r {
                    sv += ata[(m, n)] * x[lay.v(i, n)];
                    sdtv += ata[(m, n)] * x[lay.dtv(i, n)];
                }
                out[k] = x[lay.u(i, m)] - x[lay.u0m(m)] - h * sw;
                out[sr + k] = x[lay.w(i, m)] - x[lay.w0m(m)] - h * sdxw;
                out[2 * sr + k] = x[lay.u(i, m)] - inp.u0[i] - tau * sv;
                out[3 * sr + k] = x[lay.v(i, m)] - inp.v0[i] - tau * sdtv;
                out[4 * sr + k] = x[lay.dtv(i, m)] - x[lay.dxw(i, m)]
                    + self.potential.derivative(x[lay.u(i, m)]);
            }
        }
        for m in 0..r {
            let (mut bw, mut bdxw) = (0.0, 0.0);
            for i in 0..s {
                bw += self.b[i] * x[lay.w(i, m)];
                bdxw += self.b[i] * x[lay.dxw(i, m)];
            }
            out[5 * sr + m] = next[lay.u0m(m)] - x[lay.u0m(m)] - h * bw;
            out[5 * sr + r + m] = next[lay.w0m(m)] - x[lay.w0m(m)] - h * bdxw;
        }
        if !lay.is_alpha() {
            return;
        }
        let base = 5 * sr + 2 * r;
        for i in 0..s {
            let (mut bv, mut bdtv) = (0.0, 0.0);
            for m in 0..r {
                bv += self.bt[m] * x[lay.v(i, m)];
                bdtv += self.bt[m] * x[lay.dtv(i, m)];
            }
            out[base + i] = x[lay.u1(i)] - inp.u0[i] - tau * bv;
            out[base + s + i] = x[lay.v1(i)] - inp.v0[i] - tau * bdtv;
        }
        let base = base + 2 * s;
        let mut btv = 0.0;
        for m in 0..r {
            let v0m = x[lay.v0m(m).unwrap()];
            btv += self.bt[m] * v0m;
            let mut sv = 0.0;
            for n in 0..r {
                sv += ata[(m, n)] * x[lay.v0m(n).unwrap()];
            }
            out[base + m] = x[lay.u0m(m)] - inp.u00 - tau * sv;
        }
        let base = base + r;
        for i in 0..s {
            let mut sw = 0.0;
            for j in 0..s {
                sw += self.a[(i, j)] * x[lay.w1(j)];
            }
            out[base + i] = x[lay.u1(i)] - x[lay.u10()] - h * sw;
        }
        out[base + s] = x[lay.u10()] - inp.u00 - tau * btv;
        out[base + s + 1] = match row {
            EnergyRow::Frozen => alpha,
            EnergyRow::Constraint => energy_constraint(&self.edges(lay, inp, x, next), self),
        };
    }

    /// Jacobian blocks with respect to the cell's own unknowns and the next cell's unknowns.
    pub fn jacobian(
        &self,
        lay: &CellLayout,
        inp: &CellInputs,
        x: &[f64],
        next: &[f64],
        row: EnergyRow,
        own: &mut DMatrix<f64>,
        nb: &mut DMatrix<f64>,
    ) {
        let _ = inp;
        let (s, r, h, tau) = (lay.s, lay.r, self.h, self.tau);
        let sr = s * r;
        own.fill(0.0);
        nb.fill(0.0);
        let ka = lay.alpha();
        let alpha = ka.map_or(0.0, |k| x[k]);
        let (aa, ata) = self.a_alpha(alpha);
        for i in 0..s {
            for m in 0..r {
                let k = i * r + m;
                own[(k, lay.u(i, m))] = 1.0;
                own[(k, lay.u0m(m))] = -1.0;
                own[(sr + k, lay.w(i, m))] = 1.0;
                own[(sr + k, lay.w0m(m))] = -1.0;
                for j in 0..s {
                    own[(k, lay.w(j, m))] -= h * aa[(i, j)];
                    own[(sr + k, lay.dxw(j, m))] -= h * aa[(i, j)];
                }
                own[(2 * sr + k, lay.u(i, m))] += 1.0;
                own[(3 * sr + k, lay.v(i, m))] += 1.0;
                for n in 0..r {
                    own[(2 * sr + k, lay.v(i, n))] -= tau * ata[(m, n)];
                    own[(3 * sr + k, lay.dtv(i, n))] -= tau * ata[(m, n)];
                }
                own[(4 * sr + k, lay.dtv(i, m))] = 1.0;
                own[(4 * sr + k, lay.dxw(i, m))] = -1.0;
                own[(4 * sr + k, lay.u(i, m))] = self.potential.second_derivative(x[lay.u(i, m)]);
                if let Some(ka) = ka {
                    let (mut dw, mut ddxw) = (0.0, 0.0);
                    for j in 0..s {
                        dw += self.da[(i, j)] * x[lay.w(j, m)];
                        ddxw += self.da[(i, j)] * x[lay.dxw(j, m)];
                    }
                    let (mut dv, mut ddtv) = (0.0, 0.0);
                    for n in 0..r {
                        dv += self.dat[(m, n)] * x[lay.v(i, n)];
                        ddtv += self.dat[(m, n)] * x[lay.dtv(i, n)];
                    }
                    own[(k, ka)] = -h * dw;
                    own[(sr + k, ka)] = -h * ddxw;
                    own[(2 * sr + k, ka)] = -tau * dv;
                    own[(3 * sr + k, ka)] = -tau * ddtv;
                }
            }
        }
        for m in 0..r {
            let (cu, cw) = (5 * sr + m, 5 * sr + r + m);
            nb[(cu, lay.u0m(m))] = 1.0;
            nb[(cw, lay.w0m(m))] = 1.0;
            own[(cu, lay.u0m(m))] = -1.0;
            own[(cw, lay.w0m(m))] = -1.0;
            for i in 0..s {
                own[(cu, lay.w(i, m))] = -h * self.b[i];
                own[(cw, lay.dxw(i, m))] = -h * self.b[i];
            }
        }
        let Some(ka) = ka else { return };
        let base = 5 * sr + 2 * r;
        for i in 0..s {
            own[(base + i, lay.u1(i))] = 1.0;
            own[(base + s + i, lay.v1(i))] = 1.0;
            for m in 0..r {
                own[(base + i, lay.v(i, m))] = -tau * self.bt[m];
                own[(base + s + i, lay.dtv(i, m))] = -tau * self.bt[m];
            }
        }
        let base = base + 2 * s;
        for m in 0..r {
            own[(base + m, lay.u0m(m))] = 1.0;
            let mut d = 0.0;
            for n in 0..r {
                let vn = lay.v0m(n).unwrap();
                own[(base + m, vn)] -= tau * ata[(m, n)];
                d += self.dat[(m, n)] * x[vn];
            }
            own[(base + m, ka)] = -tau * d;
        }
        let base = base + r;
        for i in 0..s {
            own[(base + i, lay.u1(i))] = 1.0;
            own[(base + i, lay.u10())] = -1.0;
            for j in 0..s {
                own[(base + i, lay.w1(j))] = -h * self.a[(i, j)];
            }
        }
        own[(base + s, lay.u10())] = 1.0;
        for m in 0..r {
            own[(base + s, lay.v0m(m).unwrap())] = -tau * self.bt[m];
        }
        let e = base + s + 1;
        match row {
            EnergyRow::Frozen => own[(e, ka)] = 1.0,
            EnergyRow::Constraint => {
                for i in 0..s {
                    let hb = h * self.b[i];
                    own[(e, lay.u1(i))] = hb * self.potential.derivative(x[lay.u1(i)]);
                    own[(e, lay.v1(i))] = hb * x[lay.v1(i)];
                    own[(e, lay.w1(i))] = hb * x[lay.w1(i)];
                }
                for m in 0..r {
                    let tb = tau * self.bt[m];
                    let (v, w) = (lay.v0m(m).unwrap(), lay.w0m(m));
                    nb[(e, v)] = -tb * next[w];
                    nb[(e, w)] = -tb * next[v];
                    own[(e, v)] = tb * x[w];
                    own[(e, w)] = tb * x[v];
                }
            }
        }
    }

    /// Max-norm of the α column of the stage rows: how strongly α can act on this cell.
    pub fn alpha_sensitivity(&self, lay: &CellLayout, x: &[f64]) -> f64 {
        let (s, r) = (lay.s, lay.r);
        let mut out: f64 = 0.0;
        for i in 0..s {
            for m in 0..r {
                let (mut dw, mut ddxw, mut dv, mut ddtv) = (0.0, 0.0, 0.0, 0.0);
                for j in 0..s {
                    dw += self.da[(i, j)] * x[lay.w(j, m)];
                    ddxw += self.da[(i, j)] * x[lay.dxw(j, m)];
                }
                for n in 0..r {
                    dv += self.dat[(m, n)] * x[lay.v(i, n)];
                    ddtv += self.dat[(m, n)] * x[lay.dtv(i, n)];
                }
                out = out
                    .max((self.h * dw).abs())
                    .max((self.h * ddxw).abs())
                    .max((self.tau * dv).abs())
                    .max((self.tau * ddtv).abs());
            }
        }
        out
    }

    /// Edge values of an α-mode cell.
    pub fn edges(&self, lay: &CellLayout, inp: &CellInputs, x: &[f64], next: &[f64]) -> CellEdges {
        let (s, r) = (lay.s, lay.r);
        let side = |y: &[f64]| {
            (0..r)
                .map(|m| WaveState::new(y[lay.u0m(m)], y[lay.v0m(m).unwrap()], y[lay.w0m(m)]))
                .collect()
        };
        CellEdges {
            bottom: (0..s)
                .map(|i| WaveState::new(inp.u0[i], inp.v0[i], inp.w0[i]))
                .collect(),
            top: (0..s)
                .map(|i| WaveState::new(x[lay.u1(i)], x[lay.v1(i)], x[lay.w1(i)]))
                .collect(),
            left: side(x),
            right: side(next),
        }
    }

    /// Extend a zero-mode cell solution to α-mode unknowns with α = 0.
    ///
    /// Top outputs follow from the temporal quadrature, v on the left edge from the left-edge
    /// temporal stage relation, and w on the top edge from the top spatial closure.
    pub fn lift(&self, zero: &CellLayout, inp: &CellInputs, xz: &[f64], alpha: &CellLayout) -> Vec<f64> {
        let (s, r, h, tau) = (zero.s, zero.r, self.h, self.tau);
        let mut x = vec![0.0; alpha.dim()];
        for m in 0..r {
            x[alpha.u0m(m)] = xz[zero.u0m(m)];
            x[alpha.w0m(m)] = xz[zero.w0m(m)];
        }
        for i in 0..s {
            for m in 0..r {
                x[alpha.u(i, m)] = xz[zero.u(i, m)];
                x[alpha.v(i, m)] = xz[zero.v(i, m)];
                x[alpha.w(i, m)] = xz[zero.w(i, m)];
                x[alpha.dtv(i, m)] = xz[zero.dtv(i, m)];
                x[alpha.dxw(i, m)] = xz[zero.dxw(i, m)];
            }
        }
        let du = DVector::from_fn(r, |m, _| (xz[zero.u0m(m)] - inp.u00) / tau);
        let v0m = &self.at_inv * du;
        let mut u10 = inp.u00;
        for m in 0..r {
            x[alpha.v0m(m).unwrap()] = v0m[m];
            u10 += tau * self.bt[m] * v0m[m];
        }
        x[alpha.u10()] = u10;
        let mut top = DVector::zeros(s);
        for i in 0..s {
            let (mut bv, mut bdtv) = (0.0, 0.0);
            for m in 0..r {
                bv += self.bt[m] * xz[zero.v(i, m)];
                bdtv += self.bt[m] * xz[zero.dtv(i, m)];
            }
            x[alpha.u1(i)] = inp.u0[i] + tau * bv;
            x[alpha.v1(i)] = inp.v0[i] + tau * bdtv;
            top[i] = (x[alpha.u1(i)] - u10) / h;
        }
        let w1 = &self.a_inv * top;
        for i in 0..s {
            x[alpha.w1(i)] = w1[i];
        }
        x
    }

    /// Drop the α-mode-only unknowns.
    pub fn restrict(&self, alpha: &CellLayout, x: &[f64], zero: &CellLayout) -> Vec<f64> {
        let mut xz = vec![0.0; zero.dim()];
        for m in 0..zero.r {
            xz[zero.u0m(m)] = x[alpha.u0m(m)];
            xz[zero.w0m(m)] = x[alpha.w0m(m)];
        }
        let t = zero.trace_count();
        let ta = alpha.trace_count();
        let n = 5 * zero.s * zero.r;
        xz[t..t + n].copy_from_slice(&x[ta..ta + n]);
        xz
    }

    /// Spatial closure of bottom data: w = A⁻¹(u - u00)/h.
    pub fn consistent_w(&self, u: &[f64], u00: f64) -> Vec<f64> {
        let d = DVector::from_fn(u.len(), |i, _| (u[i] - u00) / self.h);
        (&self.a_inv * d).iter().copied().collect()
    }
}

/// Stage values on the four edges of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEdges {
    pub bottom: Vec<WaveState>,
    pub top: Vec<WaveState>,
    pub left: Vec<WaveState>,
    pub right: Vec<WaveState>,
}

/// h Σ b_i (E¹_i - E⁰_i) + τ Σ b̃_m (F^m_1 - F^m_0).
pub fn energy_constraint(e: &CellEdges, ctx: &CellContext) -> f64 {
    let p = &ctx.potential;
    let mut space = 0.0;
    for i in 0..e.top.len() {
        space += ctx.b[i] * (energy_density(e.top[i], p) - energy_density(e.bottom[i], p));
    }
    let mut time = 0.0;
    for m in 0..e.left.len() {
        time += ctx.bt[m] * (energy_flux(e.right[m]) - energy_flux(e.left[m]));
    }
    ctx.h * space + ctx.tau * time
}
