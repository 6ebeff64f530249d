//! Temporal order of the midpoint/midpoint (s = r = 1) scheme on an exact standing wave.
//!
//! `cargo run --release --example convergence`

use alpha_msrk::experiment::{run, ExperimentConfig};
use alpha_msrk::model::{InitialData, Potential, Profile};
use alpha_msrk::Mode;

fn error(s: usize, dt: f64) -> f64 {
    let t = 4.0;
    let cfg = ExperimentConfig {
        potential: Potential::Quadratic { omega: 1.0 },
        profile: Profile::StandingWave { mode: 1, amplitude: 1.0, omega: 1.0 },
        domain_length: 20.0,
        t_final: t,
        dx: 0.05,
        dt,
        s,
        r: 1,
        mode: Mode::Zero,
        ..Default::default()
    };
    let out = run(&cfg).unwrap();
    let exact = InitialData::standing_wave(1, 1.0, 1.0, 20.0).unwrap();
    out.stage_x
        .iter()
        .zip(&out.final_level.u)
        .fold(0.0f64, |m, (x, u)| m.max((u - exact.state(*x, t).u).abs()))
}

fn main() {
    for s in [1, 2] {
        println!("s = {s}, r = 1");
        let mut prev: Option<f64> = None;
        for dt in [0.4, 0.2, 0.1, 0.05] {
            let e = error(s, dt);
            match prev {
                Some(p) => println!("  dt = {dt:<5} error {e:.3e}  order {:.3}", (p / e).log2()),
                None => println!("  dt = {dt:<5} error {e:.3e}"),
            }
            prev = Some(e);
        }
    }
}
