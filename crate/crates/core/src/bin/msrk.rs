use alpha_msrk::experiment::{self, ConfigError, ExperimentConfig};
use alpha_msrk::tableau::{build_w_transform, symplecticity_residual, AlphaRkFamily};
use alpha_msrk::Mode;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "msrk", version, about = "Multi-symplectic alpha-RK solver for the wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write CSV artifacts.
    Run(RunArgs),
    /// Run alpha and zero mode on the same configuration and summarize.
    Compare(RunArgs),
    /// Print α-tableaux and their symplecticity residuals.
    TableauCheck(TableauArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["alpha", "zero"])]
    mode: Option<String>,
    #[arg(long, default_value = "msrk-out")]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long = "L")]
    domain_length: Option<f64>,
}

#[derive(Args)]
struct TableauArgs {
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, num_args = 1.., allow_negative_numbers = true, default_values_t = [0.0, 0.5, -1.0])]
    alpha: Vec<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = &self.mode {
            cfg.mode = m.parse::<Mode>().map_err(ConfigError::Invalid)?;
        }
        if let Some(t) = self.tol {
            cfg.newton.tol = t;
        }
        if let Some(n) = self.maxit {
            cfg.newton.maxit = n;
        }
        cfg.dt = self.dt.unwrap_or(cfg.dt);
        cfg.dx = self.dx.unwrap_or(cfg.dx);
        cfg.t_final = self.t_final.unwrap_or(cfg.t_final);
        cfg.domain_length = self.domain_length.unwrap_or(cfg.domain_length);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: &RunArgs) -> Result<ExitCode, ExitCode> {
    let cfg = args.config().map_err(config_error)?;
    let out = experiment::run(&cfg).map_err(config_error)?;
    experiment::write_artifacts(&out, &args.out).map_err(io_error)?;
    let m = out.summary();
    println!(
        "{} steps, energy drift {:.3e}, momentum drift {:.3e}, max |alpha| {:.3e}, wall {:.2}s",
        m.steps_completed, m.max_energy_drift, m.max_momentum_drift, m.max_abs_alpha, m.total_wall_time
    );
    println!("artifacts in {}", args.out.display());
    match m.failure {
        None => Ok(ExitCode::SUCCESS),
        Some(f) => {
            eprintln!("solver failure at {f}");
            Err(ExitCode::from(EXIT_SOLVER))
        }
    }
}

fn compare(args: &RunArgs) -> Result<ExitCode, ExitCode> {
    let cfg = args.config().map_err(config_error)?;
    let c = experiment::compare(&cfg).map_err(config_error)?;
    experiment::write_comparison(&c, &args.out).map_err(io_error)?;
    print!("{}", experiment::comparison_report(&c));
    if c.alpha.completed() && c.zero.completed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(ExitCode::from(EXIT_SOLVER))
    }
}

fn tableau_check(args: &TableauArgs) -> Result<ExitCode, ExitCode> {
    let fam = AlphaRkFamily::gauss(args.s, args.r).map_err(|e| config_error(e.into()))?;
    let w = build_w_transform(&fam.spatial.base).map_err(|e| config_error(e.into()))?;
    println!("Gauss s = {}, r = {}", args.s, args.r);
    println!("X = {:.15}", w.x);
    println!("dA/dalpha = {:.15}", fam.spatial.derivative);
    let mut worst: f64 = 0.0;
    for &a in &args.alpha {
        let (aa, at) = fam.alpha_tableau(a);
        let rs = symplecticity_residual(&aa, &fam.spatial.base.b);
        let rt = symplecticity_residual(&at, &fam.temporal.base.b);
        worst = worst.max(rs).max(rt);
        println!("alpha = {a:+.4}: symplecticity residual {rs:.2e} (space), {rt:.2e} (time)");
        println!("A(alpha) = {aa:.15}");
    }
    if worst <= 1e-13 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("symplecticity residual {worst:.2e} exceeds 1e-13");
        Err(ExitCode::from(EXIT_SOLVER))
    }
}

fn config_error(e: ConfigError) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn io_error(e: std::io::Error) -> ExitCode {
    eprintln!("cannot write artifacts: {e}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::TableauCheck(a) => tableau_check(a),
    };
    result.unwrap_or_else(|code| code)
}
