//! Global system of one time level: all cells chained under periodic boundary conditions.

use crate::band::{BandMatrix, SolverError};
use crate::cell::{CellContext, CellLayout, EnergyRow, LevelData, Mode};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("step sizes and lengths must be positive and finite")]
    NonPositive,
    #[error("L = {l} is not an integer multiple of dx = {h}")]
    Cells { l: f64, h: f64 },
    #[error("T = {t} is not an integer multiple of dt = {tau}")]
    Steps { t: f64, tau: f64 },
}

/// Uniform periodic grid on [-L/2, L/2) × [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub l: f64,
    pub m: usize,
    pub h: f64,
    pub tau: f64,
    pub t_final: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(l: f64, h: f64, tau: f64, t_final: f64) -> Result<Self, GridError> {
        if !(l > 0.0 && h > 0.0 && tau > 0.0 && t_final >= 0.0)
            || !(l.is_finite() && t_final.is_finite())
        {
            return Err(GridError::NonPositive);
        }
        let m = (l / h).round();
        if m < 1.0 || (m * h - l).abs() > 1e-12 * l.max(1.0) {
            return Err(GridError::Cells { l, h });
        }
        let steps = (t_final / tau).round();
        if (steps * tau - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(GridError::Steps { t: t_final, tau });
        }
        Ok(Self {
            l,
            m: m as usize,
            h,
            tau,
            t_final,
            steps: steps as usize,
        })
    }

    /// Left edge of cell j.
    pub fn x(&self, j: usize) -> f64 {
        -self.l / 2.0 + j as f64 * self.h
    }
}

/// Declared bandwidth of the cell-major Jacobian: (5s+3)r+3s+4 in α-mode, (5s+2)r+2 otherwise.
pub fn declared_bandwidth(layout: &CellLayout) -> usize {
    layout.dim() + 2
}

/// Nonlinear system for the unknowns of one time level.
#[derive(Debug, Clone)]
pub struct TimeLevelSystem<'a> {
    pub ctx: &'a CellContext,
    pub layout: CellLayout,
    pub bottom: &'a LevelData,
    /// Cells whose α is pinned to zero instead of enforcing the energy law.
    pub frozen: Vec<bool>,
}

impl<'a> TimeLevelSystem<'a> {
    pub fn new(ctx: &'a CellContext, mode: Mode, bottom: &'a LevelData) -> Self {
        let layout = CellLayout::new(ctx.s(), ctx.r(), mode);
        assert_eq!(bottom.s, ctx.s(), "bottom data has the wrong stage count");
        Self {
            ctx,
            layout,
            bottom,
            frozen: vec![false; bottom.cells()],
        }
    }

    pub fn cells(&self) -> usize {
        self.bottom.cells()
    }

    pub fn dimension(&self) -> usize {
        self.cells() * self.layout.dim()
    }

    pub fn bandwidth(&self) -> usize {
        declared_bandwidth(&self.layout)
    }

    fn row_kind(&self, j: usize) -> EnergyRow {
        if self.frozen[j] {
            EnergyRow::Frozen
        } else {
            EnergyRow::Constraint
        }
    }

    fn cell<'x>(&self, x: &'x [f64], j: usize) -> &'x [f64] {
        let n = self.layout.dim();
        &x[j * n..(j + 1) * n]
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (n, m) = (self.layout.dim(), self.cells());
        assert_eq!(x.len(), n * m, "global vector has the wrong length");
        let mut out = vec![0.0; n * m];
        for j in 0..m {
            self.ctx.residual(
                &self.layout,
                &self.bottom.inputs(j),
                self.cell(x, j),
                self.cell(x, (j + 1) % m),
                self.row_kind(j),
                &mut out[j * n..(j + 1) * n],
            );
        }
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> BlockJacobian {
        let (n, m) = (self.layout.dim(), self.cells());
        assert_eq!(x.len(), n * m, "global vector has the wrong length");
        let mut own = Vec::with_capacity(m);
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            let mut a = DMatrix::zeros(n, n);
            let mut b = DMatrix::zeros(n, n);
            self.ctx.jacobian(
                &self.layout,
                &self.bottom.inputs(j),
                self.cell(x, j),
                self.cell(x, (j + 1) % m),
                self.row_kind(j),
                &mut a,
                &mut b,
            );
            own.push(a);
            next.push(b);
        }
        BlockJacobian {
            layout: self.layout,
            own,
            next,
        }
    }
}

/// Jacobian of a time level as per-cell blocks: `own[j]` couples cell j's rows to its own
/// unknowns, `next[j]` to the unknowns of cell (j+1) mod M.
#[derive(Debug, Clone)]
pub struct BlockJacobian {
    pub layout: CellLayout,
    pub own: Vec<DMatrix<f64>>,
    pub next: Vec<DMatrix<f64>>,
}

impl BlockJacobian {
    pub fn cells(&self) -> usize {
        self.own.len()
    }

    pub fn dimension(&self) -> usize {
        self.cells() * self.layout.dim()
    }

    /// Nonzero entries (row, col, value) in cell-major ordering.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let (n, m) = (self.layout.dim(), self.cells());
        let mut out = Vec::new();
        for j in 0..m {
            let jn = (j + 1) % m;
            for r in 0..n {
                for c in 0..n {
                    // M = 1 puts both blocks on the diagonal; sum them.
                    let mut v = self.own[j][(r, c)];
                    if jn == j {
                        v += self.next[j][(r, c)];
                    } else if self.next[j][(r, c)] != 0.0 {
                        out.push((j * n + r, jn * n + c, self.next[j][(r, c)]));
                    }
                    if v != 0.0 {
                        out.push((j * n + r, j * n + c, v));
                    }
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let nn = self.dimension();
        let mut d = DMatrix::zeros(nn, nn);
        for (r, c, v) in self.entries() {
            d[(r, c)] += v;
        }
        d
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dimension()];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
        }
        y
    }

    /// Solve J dx = rhs. The periodic chain is folded (cells 0, M-1, 1, M-2, ...) so that
    /// neighbouring cells stay within a few blocks of each other and the whole matrix,
    /// wrap included, is an ordinary band matrix.
    pub fn solve(&self, rhs: &[f64]) -> Result<(Vec<f64>, u64), SolverError> {
        let nn = self.dimension();
        if rhs.len() != nn {
            return Err(SolverError::Dimension {
                expected: nn,
                got: rhs.len(),
            });
        }
        let perm = FoldedOrdering::new(&self.layout, self.cells());
        let entries: Vec<(usize, usize, f64)> = self
            .entries()
            .into_iter()
            .map(|(r, c, v)| (perm.row[r], perm.col[c], v))
            .collect();
        let (mut kl, mut ku) = (0, 0);
        for &(r, c, _) in &entries {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        let mut band = BandMatrix::zeros(nn, kl, ku);
        for &(r, c, v) in &entries {
            band.add(r, c, v)?;
        }
        let mut b = vec![0.0; nn];
        for (i, &v) in rhs.iter().enumerate() {
            b[perm.row[i]] = v;
        }
        let lu = band.lu()?;
        let y = lu.solve(&b)?;
        let x = (0..nn).map(|c| y[perm.col[c]]).collect();
        Ok((x, lu.flops()))
    }
}

/// Row and column permutations from cell-major ordering to folded ordering.
#[derive(Debug, Clone)]
pub struct FoldedOrdering {
    pub row: Vec<usize>,
    pub col: Vec<usize>,
}

impl FoldedOrdering {
    pub fn new(layout: &CellLayout, cells: usize) -> Self {
        let n = layout.dim();
        let m = cells;
        let order: Vec<usize> = (0..m)
            .map(|p| if p % 2 == 0 { p / 2 } else { m - 1 - (p - 1) / 2 })
            .collect();
        let mut pos = vec![0; m];
        for (p, &j) in order.iter().enumerate() {
            pos[j] = p;
        }
        let mut local_rows: Vec<usize> = (0..n).filter(|&r| !layout.couples_to_next(r)).collect();
        local_rows.extend((0..n).filter(|&r| layout.couples_to_next(r)));
        let mut row = vec![0; n * m];
        let mut col = vec![0; n * m];
        for j in 0..m {
            // traces face the previous cell, coupling rows face the next one
            let rows_ahead = pos[(j + 1) % m] >= pos[j];
            let cols_ahead = pos[(j + m - 1) % m] <= pos[j];
            for k in 0..n {
                let rk = if rows_ahead { local_rows[k] } else { local_rows[n - 1 - k] };
                let ck = if cols_ahead { k } else { n - 1 - k };
                row[j * n + rk] = pos[j] * n + k;
                col[j * n + ck] = pos[j] * n + k;
            }
        }
        Self { row, col }
    }
}
