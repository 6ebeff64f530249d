//! Banded Gaussian elimination: accuracy against a dense solve and counted operations
//! against the N d² - 2d³/3 + N d - d²/2 cost model.
//!
//! `cargo run --release --example band_solver`

use alpha_msrk::band::{band_lu_solve, BandMatrix};
use alpha_msrk::newton::cost_estimate;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(1);
    println!("{:>6} {:>4} {:>12} {:>12} {:>8} {:>10}", "N", "d", "counted", "model", "ratio", "error");
    for (n, d) in [(100, 3), (500, 5), (1200, 14), (2100, 23)] {
        let mut a = BandMatrix::zeros(n, d, d);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(d)..(i + d + 1).min(n) {
                let v = rng.gen_range(-1.0..1.0);
                a.set(i, j, v).unwrap();
                dense[(i, j)] = v;
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = band_lu_solve(&a, &rhs).unwrap();
        let y = dense.lu().solve(&DVector::from_column_slice(&rhs)).unwrap();
        let err = x.iter().zip(y.iter()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / y.amax();
        let counted = a.lu().unwrap().flops() as f64;
        let model = cost_estimate(n, d);
        println!("{n:>6} {d:>4} {counted:>12.0} {model:>12.0} {:>8.3} {err:>10.1e}", counted / model);
    }
    println!("alpha/zero cost ratio at M = 100: {:.3}", cost_estimate(2100, 23) / cost_estimate(1200, 14));
}
