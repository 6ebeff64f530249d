//! Band matrices and Gaussian elimination with partial pivoting inside the band.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is numerically singular at column {column} (pivot {pivot:e})")]
    Singular { column: usize, pivot: f64 },
    #[error("entry ({row}, {col}) lies outside the band (kl = {kl}, ku = {ku})")]
    OutsideBand { row: usize, col: usize, kl: usize, ku: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Relative pivot threshold below which a matrix is reported singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// n×n matrix with kl sub- and ku super-diagonals.
///
/// Column-major band storage with kl extra rows on top for the fill produced by row
/// interchanges: A(i, j) sits at `ab[(kl + ku + i - j) + j * ldab]`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, 1.0).unwrap();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ldab
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<(), SolverError> {
        if !self.in_band(i, j) {
            return Err(self.outside(i, j));
        }
        let k = self.idx(i, j);
        self.ab[k] = v;
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), SolverError> {
        if !self.in_band(i, j) {
            return Err(self.outside(i, j));
        }
        let k = self.idx(i, j);
        self.ab[k] += v;
        Ok(())
    }

    fn outside(&self, row: usize, col: usize) -> SolverError {
        SolverError::OutsideBand {
            row,
            col,
            kl: self.kl,
            ku: self.ku,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                y[i] += self.ab[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    fn amax(&self) -> f64 {
        self.ab.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// LU factorization with partial pivoting (rows j..=j+kl at step j).
    pub fn lu(mut self) -> Result<BandLu, SolverError> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let ld = self.ldab;
        let scale = self.amax().max(f64::MIN_POSITIVE);
        let mut ipiv = vec![0usize; n];
        let mut flops: u64 = 0;
        let mut ju = 0usize;
        let ab = &mut self.ab;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let mut jp = 0;
            let mut best = ab[col].abs();
            for i in 1..=km {
                let v = ab[col + i].abs();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if best <= PIVOT_TOLERANCE * scale {
                return Err(SolverError::Singular {
                    column: j,
                    pivot: best,
                });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let base = c * ld + kv - c;
                    ab.swap(base + j, base + j + jp);
                }
            }
            if km > 0 {
                let rp = 1.0 / ab[col];
                for i in 1..=km {
                    ab[col + i] *= rp;
                }
                flops += km as u64;
                for c in j + 1..=ju {
                    let base = c * ld + kv - c;
                    let t = ab[base + j];
                    if t != 0.0 {
                        for i in 1..=km {
                            ab[base + j + i] -= ab[col + i] * t;
                        }
                    }
                }
                flops += (km * (ju - j)) as u64;
            }
        }
        Ok(BandLu {
            m: self,
            ipiv,
            flops,
        })
    }
}

/// Factors produced by [`BandMatrix::lu`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
    flops: u64,
}

impl BandLu {
    /// Multiply-add count of the factorization.
    pub fn flops(&self) -> u64 {
        self.flops
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let BandMatrix { n, kl, ku, ldab, ref ab } = self.m;
        if rhs.len() != n {
            return Err(SolverError::Dimension {
                expected: n,
                got: rhs.len(),
            });
        }
        let kv = kl + ku;
        let mut x = rhs.to_vec();
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                x.swap(l, j);
            }
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let xj = x[j];
            for i in 1..=km {
                x[j + i] -= ab[col + i] * xj;
            }
        }
        for j in (0..n).rev() {
            let col = j * ldab + kv;
            x[j] /= ab[col];
            let xj = x[j];
            for i in j.saturating_sub(kv)..j {
                x[i] -= ab[col + i - j] * xj;
            }
        }
        Ok(x)
    }
}

/// Factor and solve in one call.
pub fn band_lu_solve(a: &BandMatrix, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    a.clone().lu()?.solve(rhs)
}
