//! One space-time cell of the s = 2, r = 1 scheme: residual rows, Jacobian sparsity and
//! the α column.
//!
//! `cargo run --example cell_system`

use alpha_msrk::cell::{CellContext, CellInputs, CellLayout, EnergyRow, Mode};
use alpha_msrk::model::Potential;
use alpha_msrk::tableau::AlphaRkFamily;
use nalgebra::DMatrix;

fn main() {
    let ctx = CellContext::new(&AlphaRkFamily::gauss(2, 1).unwrap(), 1.0, 0.1, Potential::SineGordon);
    let lay = CellLayout::new(2, 1, Mode::Alpha);
    let n = lay.dim();
    println!("{n} unknowns per cell, zero mode keeps {}", CellLayout::new(2, 1, Mode::Zero).dim());

    let (u0, v0, w0) = ([0.3, 0.5], [-0.1, 0.2], [0.4, 0.35]);
    let inp = CellInputs {
        u0: &u0,
        v0: &v0,
        w0: &w0,
        u00: 0.1,
    };
    let x: Vec<f64> = (0..n).map(|k| 0.1 * ((k * 7 % 11) as f64 - 5.0)).collect();
    let mut res = vec![0.0; n];
    ctx.residual(&lay, &inp, &x, &x, EnergyRow::Constraint, &mut res);
    let (mut own, mut next) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
    ctx.jacobian(&lay, &inp, &x, &x, EnergyRow::Constraint, &mut own, &mut next);

    println!("row  residual     own-block pattern        next");
    for r in 0..n {
        let pat: String = (0..n).map(|c| if own[(r, c)] != 0.0 { '#' } else { '.' }).collect();
        let nb: String = (0..n).map(|c| if next[(r, c)] != 0.0 { '#' } else { '.' }).collect();
        println!("{r:>3} {:>10.3e}  {pat}  {nb}", res[r]);
    }
    let ka = lay.alpha().unwrap();
    println!("alpha column: {:.3?}", own.column(ka).iter().collect::<Vec<_>>());
}
