//! Butcher tableaux, the W-transformation and alpha-perturbed families.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Largest Gauss stage count supported by [`gauss_tableau`].
pub const MAX_GAUSS_STAGES: usize = 5;

/// Condition number of W above which [`WTransform::ill_conditioned`] reports true.
pub const W_CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableauError {
    #[error("unsupported stage count {0} (expected 1..={MAX_GAUSS_STAGES})")]
    UnsupportedStages(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("abscissae are not distinct")]
    RepeatedAbscissae,
    #[error("W matrix is singular")]
    SingularW,
    #[error("invalid perturbation placement ({p}, {q}) for s = {s}")]
    Placement { s: usize, p: usize, q: usize },
}

/// Coefficients (A, b, c) of an s-stage Runge-Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
}

impl ButcherTableau {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Result<Self, TableauError> {
        let s = b.len();
        if s == 0 || a.nrows() != s || a.ncols() != s || c.len() != s {
            return Err(TableauError::Dimension(format!(
                "A is {}x{}, b has {}, c has {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// max_i |c_i - sum_j a_ij|
    pub fn row_sum_defect(&self) -> f64 {
        (0..self.stages())
            .map(|i| (self.c[i] - self.a.row(i).sum()).abs())
            .fold(0.0, f64::max)
    }

    /// Largest k such that sum_i b_i c_i^(j-1) = 1/j for all j <= k, within `tol`.
    pub fn quadrature_order(&self, tol: f64) -> usize {
        let mut k = 0;
        while k < 4 * self.stages() {
            let j = k + 1;
            let q: f64 = (0..self.stages())
                .map(|i| self.b[i] * self.c[i].powi(j as i32 - 1))
                .sum();
            if (q - 1.0 / j as f64).abs() > tol {
                break;
            }
            k = j;
        }
        k
    }
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    // Standard Legendre L_n on [-1, 1] and its derivative.
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (t * t - 1.0).abs() < 1e-300 {
        // endpoint value L_n'(±1) = (±1)^(n+1) n(n+1)/2
        t.powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        nf * (t * p1 - p0) / (t * t - 1.0)
    };
    (p1, dp)
}

/// Shifted, normalized Legendre polynomial P_k on [0, 1], with ∫ P_j P_k = δ_jk.
pub fn shifted_legendre(k: usize, x: f64) -> f64 {
    let (p, _) = legendre_with_derivative(k, 2.0 * x - 1.0);
    (2.0 * k as f64 + 1.0).sqrt() * p
}

fn gauss_nodes_weights(s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(s);
    let mut weights = Vec::with_capacity(s);
    let sf = s as f64;
    for i in 0..s {
        // roots of L_s in descending order; mapped to ascending c below
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (sf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(s, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(s, t);
        nodes.push((1.0 - t) / 2.0);
        weights.push(1.0 / ((1.0 - t * t) * dp * dp));
    }
    (nodes, weights)
}

/// s-stage Gauss collocation tableau (order 2s).
pub fn gauss_tableau(s: usize) -> Result<ButcherTableau, TableauError> {
    match s {
        1 => ButcherTableau::new(
            DMatrix::from_element(1, 1, 0.5),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 0.5),
        ),
        2 => {
            let r = 3f64.sqrt() / 6.0;
            ButcherTableau::new(
                DMatrix::from_row_slice(2, 2, &[0.25, 0.25 - r, 0.25 + r, 0.25]),
                DVector::from_vec(vec![0.5, 0.5]),
                DVector::from_vec(vec![0.5 - r, 0.5 + r]),
            )
        }
        3..=MAX_GAUSS_STAGES => {
            let (c, b) = gauss_nodes_weights(s);
            // collocation conditions: sum_j a_ij c_j^(k-1) = c_i^k / k
            let vand = DMatrix::from_fn(s, s, |k, j| c[j].powi(k as i32));
            let lu = vand.lu();
            let mut a = DMatrix::zeros(s, s);
            for i in 0..s {
                let rhs = DVector::from_fn(s, |k, _| c[i].powi(k as i32 + 1) / (k as f64 + 1.0));
                let row = lu.solve(&rhs).ok_or(TableauError::RepeatedAbscissae)?;
                a.row_mut(i).copy_from(&row.transpose());
            }
            ButcherTableau::new(a, DVector::from_vec(b), DVector::from_vec(c))
        }
        _ => Err(TableauError::UnsupportedStages(s)),
    }
}

/// max-norm of BA + AᵀB - bbᵀ.
pub fn symplecticity_residual(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    let bm = DMatrix::from_diagonal(b);
    let m = &bm * a + a.transpose() * &bm - b * b.transpose();
    m.amax()
}

/// W-transformation data of a tableau.
#[derive(Debug, Clone)]
pub struct WTransform {
    pub w: DMatrix<f64>,
    pub w_inv: DMatrix<f64>,
    pub xi: Vec<f64>,
    pub x: DMatrix<f64>,
    pub condition: f64,
}

impl WTransform {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > W_CONDITION_WARNING
    }
}

/// ξ_k = 1 / (2 sqrt(4k² - 1))
pub fn xi(k: usize) -> f64 {
    let k = k as f64;
    1.0 / (2.0 * (4.0 * k * k - 1.0).sqrt())
}

pub fn build_w_transform(t: &ButcherTableau) -> Result<WTransform, TableauError> {
    let s = t.stages();
    for i in 0..s {
        for j in 0..i {
            if (t.c[i] - t.c[j]).abs() < 1e-12 {
                return Err(TableauError::RepeatedAbscissae);
            }
        }
    }
    let w = DMatrix::from_fn(s, s, |i, j| shifted_legendre(j, t.c[i]));
    let w_inv = w.clone().lu().try_inverse().ok_or(TableauError::SingularW)?;
    let sv = w.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if smin == 0.0 {
        return Err(TableauError::SingularW);
    }
    let bm = DMatrix::from_diagonal(&t.b);
    let x = w.transpose() * &bm * &t.a * &w;
    Ok(WTransform {
        w,
        w_inv,
        xi: (1..s).map(xi).collect(),
        x,
        condition: smax / smin,
    })
}

/// Skew placement of the ±1 pair in V: V[p][q] = +1, V[q][p] = -1 (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationPattern {
    s: usize,
    placement: Option<(usize, usize)>,
}

impl PerturbationPattern {
    /// V_{s,1} = +1, V_{1,s} = -1; zero when s = 1.
    pub fn default_for(s: usize) -> Self {
        Self {
            s,
            placement: (s > 1).then_some((s - 1, 0)),
        }
    }

    pub fn new(s: usize, p: usize, q: usize) -> Result<Self, TableauError> {
        if s == 1 {
            return Ok(Self::default_for(1));
        }
        if p >= s || q >= s || p == q {
            return Err(TableauError::Placement { s, p, q });
        }
        Ok(Self {
            s,
            placement: Some((p, q)),
        })
    }

    pub fn placement(&self) -> Option<(usize, usize)> {
        self.placement
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.s, self.s);
        if let Some((p, q)) = self.placement {
            v[(p, q)] = 1.0;
            v[(q, p)] = -1.0;
        }
        v
    }
}

/// One tableau together with its W-transformation and perturbation direction.
#[derive(Debug, Clone)]
pub struct PerturbedTableau {
    pub base: ButcherTableau,
    pub transform: WTransform,
    pub pattern: PerturbationPattern,
    /// ∂A(α)/∂α, constant in α.
    pub derivative: DMatrix<f64>,
    /// True when WᵀBW = I so that (WᵀB)⁻¹ = W.
    pub simplified: bool,
}

impl PerturbedTableau {
    pub fn new(base: ButcherTableau, pattern: PerturbationPattern) -> Result<Self, TableauError> {
        let s = base.stages();
        if pattern.s != s {
            return Err(TableauError::Dimension(format!(
                "pattern for s = {} applied to {s}-stage tableau",
                pattern.s
            )));
        }
        let transform = build_w_transform(&base)?;
        let bm = DMatrix::from_diagonal(&base.b);
        let gram = transform.w.transpose() * &bm * &transform.w;
        let simplified = (gram - DMatrix::<f64>::identity(s, s)).amax() < 1e-12;
        let v = pattern.matrix();
        let derivative = if simplified {
            &transform.w * v * transform.w.transpose() * bm
        } else {
            let wtb_inv = (transform.w.transpose() * bm)
                .lu()
                .try_inverse()
                .ok_or(TableauError::SingularW)?;
            wtb_inv * v * &transform.w_inv
        };
        Ok(Self {
            base,
            transform,
            pattern,
            derivative,
            simplified,
        })
    }

    pub fn stages(&self) -> usize {
        self.base.stages()
    }

    /// X(α) = X + αV
    pub fn x_alpha(&self, alpha: f64) -> DMatrix<f64> {
        &self.transform.x + self.pattern.matrix() * alpha
    }

    /// A(α) = A + α ∂A/∂α; exactly A at α = 0.
    pub fn a_alpha(&self, alpha: f64) -> DMatrix<f64> {
        if alpha == 0.0 {
            return self.base.a.clone();
        }
        &self.base.a + &self.derivative * alpha
    }
}

/// Concatenated pair of perturbed tableaux: s stages in space, r stages in time.
#[derive(Debug, Clone)]
pub struct AlphaRkFamily {
    pub spatial: PerturbedTableau,
    pub temporal: PerturbedTableau,
}

impl AlphaRkFamily {
    pub fn new(spatial: PerturbedTableau, temporal: PerturbedTableau) -> Self {
        Self { spatial, temporal }
    }

    /// Gauss(s) in space and Gauss(r) in time with the default placement.
    pub fn gauss(s: usize, r: usize) -> Result<Self, TableauError> {
        Ok(Self {
            spatial: PerturbedTableau::new(gauss_tableau(s)?, PerturbationPattern::default_for(s))?,
            temporal: PerturbedTableau::new(gauss_tableau(r)?, PerturbationPattern::default_for(r))?,
        })
    }

    pub fn s(&self) -> usize {
        self.spatial.stages()
    }

    pub fn r(&self) -> usize {
        self.temporal.stages()
    }

    /// (A(α), Ã(α))
    pub fn alpha_tableau(&self, alpha: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.spatial.a_alpha(alpha), self.temporal.a_alpha(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_derivative_branch() {
        let (_, d) = legendre_with_derivative(3, 1.0);
        assert!((d - 6.0).abs() < 1e-14);
    }

    #[test]
    fn s4_is_order_eight() {
        let t = gauss_tableau(4).unwrap();
        assert_eq!(t.quadrature_order(1e-13), 8);
        assert!(t.row_sum_defect() < 1e-14);
    }

    #[test]
    fn placement_validation() {
        assert!(PerturbationPattern::new(3, 1, 1).is_err());
        assert!(PerturbationPattern::new(3, 3, 0).is_err());
        assert_eq!(PerturbationPattern::new(1, 0, 0).unwrap().placement(), None);
    }
}
