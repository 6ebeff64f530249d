//! Soliton pair for the sine-Gordon equation in both modes: energy and momentum drift,
//! the α field, and the solver cost of each mode.
//!
//! `cargo run --release --example sine_gordon [T]`

use alpha_msrk::experiment::{compare, comparison_report, ExperimentConfig};

fn main() {
    let t: f64 = std::env::args().nth(1).map_or(2.0, |a| a.parse().expect("T must be a number"));
    let cfg = ExperimentConfig {
        t_final: t,
        ..Default::default()
    };
    let c = compare(&cfg).unwrap();
    print!("{}", comparison_report(&c));

    let h = &c.alpha.history;
    println!("\n{:>6} {:>14} {:>14} {:>12}", "t", "alpha energy", "zero energy", "max |alpha|");
    let e0 = (h.energy_series[0], c.zero.history.energy_series[0]);
    for k in (0..h.alpha_field.len()).step_by(5) {
        let amax = h.alpha_field[k].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        println!(
            "{:>6.2} {:>14.3e} {:>14.3e} {:>12.3e}",
            h.times[k + 1],
            h.energy_series[k + 1] - e0.0,
            c.zero.history.energy_series[k + 1] - e0.1,
            amax
        );
    }
}
