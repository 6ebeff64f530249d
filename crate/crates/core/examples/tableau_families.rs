//! Gauss tableaux, their W-transformation and the α-perturbed families.
//!
//! `cargo run --example tableau_families`

use alpha_msrk::tableau::{build_w_transform, gauss_tableau, symplecticity_residual, AlphaRkFamily};

fn main() {
    for s in 1..=4 {
        let t = gauss_tableau(s).unwrap();
        let w = build_w_transform(&t).unwrap();
        println!("Gauss s = {s}: quadrature order {}, c = {:.6}", t.quadrature_order(1e-13), t.c.transpose());
        println!("X = {:.6}", w.x);
    }

    let f = AlphaRkFamily::gauss(3, 2).unwrap();
    println!("dA/dalpha for s = 3 = {:.6}", f.spatial.derivative);
    println!("{:>8} {:>12} {:>12}", "alpha", "space", "time");
    for k in -4..=4 {
        let alpha = 0.25 * k as f64;
        let (a, at) = f.alpha_tableau(alpha);
        println!(
            "{alpha:>8.2} {:>12.2e} {:>12.2e}",
            symplecticity_residual(&a, &f.spatial.base.b),
            symplecticity_residual(&at, &f.temporal.base.b)
        );
    }
}
