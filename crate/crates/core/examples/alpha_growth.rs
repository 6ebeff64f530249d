//! Step-by-step view of the α-mode run on the soliton pair: per-step energy error stays at
//! solver tolerance while α, the momentum error and the Newton work grow until the
//! corrector no longer converges.
//!
//! `cargo run --release --example alpha_growth`

use alpha_msrk::experiment::{run, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig {
        t_final: 5.0,
        ..Default::default()
    };
    let out = run(&cfg).unwrap();
    let h = &out.history;
    let (e0, i0) = (h.energy_series[0], h.momentum_series[0]);
    println!("{:>5} {:>6} {:>11} {:>11} {:>11} {:>6} {:>6}", "step", "t", "energy", "momentum", "max|alpha|", "iters", "active");
    for (k, s) in out.steps.iter().enumerate() {
        let amax = h.alpha_field[k].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        println!(
            "{:>5} {:>6.2} {:>11.2e} {:>11.2e} {:>11.2e} {:>6} {:>6}",
            s.step,
            s.t + out.grid.tau,
            h.energy_series[k + 1] - e0,
            h.momentum_series[k + 1] - i0,
            amax,
            s.corrector_iterations,
            out.grid.m - s.frozen_cells
        );
    }
    if let Some(f) = &out.failure {
        println!("stopped at {f}");
    }
}
