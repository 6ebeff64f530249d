use alpha_msrk::assembly::{GridSpec, TimeLevelSystem};
use alpha_msrk::band::{band_lu_solve, BandMatrix, SolverError};
use alpha_msrk::cell::{CellContext, Mode};
use alpha_msrk::integrator::{constant_guess, initial_level, Projection};
use alpha_msrk::model::{InitialData, Potential};
use alpha_msrk::newton::{cost_estimate, newton_solve, NewtonError, NewtonOptions, NonlinearSystem};
use alpha_msrk::tableau::AlphaRkFamily;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_band(n: usize, kl: usize, ku: usize, rng: &mut StdRng) -> (BandMatrix, DMatrix<f64>) {
    let mut a = BandMatrix::zeros(n, kl, ku);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
            let v = rng.gen_range(-1.0..1.0);
            a.set(i, j, v).unwrap();
            d[(i, j)] = v;
        }
    }
    (a, d)
}

fn dense_solve(d: &DMatrix<f64>, rhs: &[f64]) -> DVector<f64> {
    d.clone().lu().solve(&DVector::from_column_slice(rhs)).unwrap()
}

fn rel_err(x: &[f64], y: &DVector<f64>) -> f64 {
    let scale = y.amax();
    x.iter().zip(y.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

#[test]
fn identity_solve() {
    let rhs = [1.0, -2.0, 3.5, 0.0];
    assert_eq!(band_lu_solve(&BandMatrix::identity(4), &rhs).unwrap(), rhs.to_vec());
}

#[test]
fn random_banded_matches_dense() {
    let mut rng = StdRng::seed_from_u64(50);
    let (a, d) = random_band(50, 5, 5, &mut rng);
    let rhs: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = band_lu_solve(&a, &rhs).unwrap();
    assert!(rel_err(&x, &dense_solve(&d, &rhs)) < 1e-10);
}

#[test]
fn discrete_laplacian() {
    let n = 40;
    let mut a = BandMatrix::zeros(n, 1, 1);
    for i in 0..n {
        a.set(i, i, 2.0).unwrap();
        if i > 0 {
            a.set(i, i - 1, -1.0).unwrap();
            a.set(i - 1, i, -1.0).unwrap();
        }
    }
    let x = band_lu_solve(&a, &vec![1.0; n]).unwrap();
    let back = a.mul_vec(&x);
    assert!(back.iter().all(|b| (b - 1.0).abs() < 1e-10));
    // exact solution x_i = (i+1)(n-i)/2
    for (i, xi) in x.iter().enumerate() {
        assert!((xi - ((i + 1) * (n - i)) as f64 / 2.0).abs() < 1e-10);
    }
}

#[test]
fn singular_and_dimension_errors() {
    let mut a = BandMatrix::zeros(3, 1, 1);
    a.set(0, 0, 1.0).unwrap();
    a.set(1, 1, 1.0).unwrap();
    assert!(matches!(band_lu_solve(&a, &[1.0, 1.0, 1.0]), Err(SolverError::Singular { column: 2, .. })));
    assert!(matches!(
        band_lu_solve(&BandMatrix::identity(3), &[1.0]),
        Err(SolverError::Dimension { expected: 3, got: 1 })
    ));
}

#[test]
fn elimination_count_follows_cost_model() {
    let mut rng = StdRng::seed_from_u64(9);
    for (n, d) in [(500, 5), (800, 14), (2100, 23)] {
        let mut a = BandMatrix::zeros(n, d, d);
        for i in 0..n {
            for j in i.saturating_sub(d)..(i + d + 1).min(n) {
                let v = if i == j { 4.0 * d as f64 } else { rng.gen_range(-1.0..1.0) };
                a.set(i, j, v).unwrap();
            }
        }
        let measured = a.lu().unwrap().flops() as f64;
        let model = cost_estimate(n, d);
        assert!((measured / model - 1.0).abs() < 0.25, "N = {n}, d = {d}: {measured} vs {model}");
    }
}

#[test]
fn cost_examples() {
    let expect = 2100.0 * 529.0 - 2.0 * 12167.0 / 3.0 + 2100.0 * 23.0 - 529.0 / 2.0;
    assert_eq!(cost_estimate(2100, 23), expect);
    assert!((expect - 1.1525e6).abs() < 2e3);
    assert!((cost_estimate(77, 1) - (2.0 * 77.0 - 7.0 / 6.0)).abs() < 1e-12);
    assert!(((23.0f64 / 14.0).powi(2) - 2.70).abs() < 0.01);
}

struct Scalar;

impl NonlinearSystem for Scalar {
    fn dim(&self) -> usize {
        1
    }
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] * x[0] - 4.0]
    }
    fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, u64), SolverError> {
        Ok((vec![rhs[0] / (2.0 * x[0])], 1))
    }
}

#[test]
fn scalar_newton() {
    let opts = NewtonOptions {
        tol: 1e-14,
        ..Default::default()
    };
    let (x, stats) = newton_solve(&Scalar, &[3.0], &opts).unwrap();
    assert!((x[0] - 2.0).abs() < 1e-15);
    assert!(stats.iterations <= 7);
    let h = &stats.residual_history;
    for k in 1..h.len() - 1 {
        if h[k] > 1e-10 {
            assert!(h[k + 1] <= 2.0 * h[k] * h[k]);
        }
    }
    let (_, again) = newton_solve(&Scalar, &x, &opts).unwrap();
    assert!(again.iterations <= 1);
}

#[test]
fn nonconvergence_keeps_best_iterate() {
    struct NoRoot;
    impl NonlinearSystem for NoRoot {
        fn dim(&self) -> usize {
            1
        }
        fn residual(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0] + 1.0]
        }
        fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, u64), SolverError> {
            if x[0] == 0.0 {
                return Err(SolverError::Singular { column: 0, pivot: 0.0 });
            }
            Ok((vec![rhs[0] / (2.0 * x[0])], 1))
        }
    }
    let opts = NewtonOptions {
        maxit: 8,
        ..Default::default()
    };
    match newton_solve(&NoRoot, &[0.7], &opts) {
        Err(NewtonError::NotConverged { best_residual, best, .. }) => {
            assert!(best_residual >= 1.0);
            assert_eq!(best_residual, best[0] * best[0] + 1.0);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(newton_solve(&NoRoot, &[0.0], &opts), Err(NewtonError::Singular { iteration: 0, .. })));
}

fn sine_gordon_level(l: f64) -> (CellContext, alpha_msrk::LevelData) {
    let init = InitialData::soliton_antisoliton(0.5, l).unwrap();
    let grid = GridSpec::new(l, 1.0, 0.1, 0.1).unwrap();
    let c = CellContext::new(&AlphaRkFamily::gauss(2, 1).unwrap(), 1.0, 0.1, Potential::SineGordon);
    let level = initial_level(&init, &grid, &c, Projection::Consistent);
    (c, level)
}

#[test]
fn desk_scale_time_step() {
    let (c, level) = sine_gordon_level(100.0);
    let sys = TimeLevelSystem::new(&c, Mode::Zero, &level);
    let opts = NewtonOptions {
        tol: 1e-13,
        ..Default::default()
    };
    let (_, stats) = newton_solve(&sys, &constant_guess(&c, &level), &opts).unwrap();
    assert!(stats.final_residual <= 1e-13);
    assert!(stats.iterations <= 10);
}

#[test]
fn quadratic_convergence_from_perturbed_solution() {
    let (c, level) = sine_gordon_level(30.0);
    let sys = TimeLevelSystem::new(&c, Mode::Zero, &level);
    let (x, _) = newton_solve(&sys, &constant_guess(&c, &level), &NewtonOptions::default()).unwrap();
    let mut rng = StdRng::seed_from_u64(4);
    let start: Vec<f64> = x.iter().map(|v| v + 1e-2 * rng.gen_range(-1.0..1.0)).collect();
    let (_, stats) = newton_solve(&sys, &start, &NewtonOptions::default()).unwrap();
    let h = &stats.residual_history;
    let mut checked = 0;
    for k in 0..h.len() - 1 {
        if h[k + 1] > 1e-12 {
            assert!(h[k + 1] <= 100.0 * h[k] * h[k], "{h:?}");
            checked += 1;
        }
    }
    assert!(checked >= 1, "{h:?}");
}

#[test]
fn linear_wave_converges_in_one_step() {
    let init = InitialData::standing_wave(1, 0.5, 1.0, 20.0).unwrap();
    let grid = GridSpec::new(20.0, 0.5, 0.1, 0.1).unwrap();
    let p = Potential::Quadratic { omega: 1.0 };
    let c = CellContext::new(&AlphaRkFamily::gauss(2, 1).unwrap(), 0.5, 0.1, p);
    let level = initial_level(&init, &grid, &c, Projection::Consistent);
    let sys = TimeLevelSystem::new(&c, Mode::Zero, &level);
    let (_, stats) = newton_solve(&sys, &constant_guess(&c, &level), &NewtonOptions::default()).unwrap();
    assert!(stats.iterations <= 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn band_lu_matches_dense_oracle(n in 2usize..=100, kl in 0usize..=10, ku in 0usize..=10, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (mut a, mut d) = random_band(n, kl, ku, &mut rng);
        // keep the oracle well conditioned
        for i in 0..n {
            let v = d[(i, i)] + 3.0f64.copysign(d[(i, i)]);
            a.set(i, i, v).unwrap();
            d[(i, i)] = v;
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = band_lu_solve(&a, &rhs).unwrap();
        prop_assert!(rel_err(&x, &dense_solve(&d, &rhs)) < 1e-9);
    }

    #[test]
    fn band_lu_pivots_when_needed(n in 3usize..=60, k in 1usize..=6, seed in any::<u64>()) {
        // no diagonal boost: row interchanges are exercised
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, d) = random_band(n, k, k, &mut rng);
        let cond = d.clone().svd(false, false).singular_values;
        prop_assume!(cond.min() > 1e-6 * cond.max());
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = band_lu_solve(&a, &rhs).unwrap();
        let back = a.mul_vec(&x);
        let res = back.iter().zip(&rhs).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        prop_assert!(res < 1e-8 * x.iter().fold(1.0f64, |m, v| m.max(v.abs())));
    }
}
