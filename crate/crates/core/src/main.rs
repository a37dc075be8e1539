use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use growthlab::scenario::{self, PotentialType, ScenarioConfig, ScenarioKind};
use growthlab::Error;

/// Laplacian growth, string equations and Painleve I scaling of normal matrix droplets.
#[derive(Debug, Parser)]
#[command(name = "growthlab", version)]
struct Cli {
    /// Run the scenario described by a TOML file instead of a subcommand.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// RNG seed (sampling only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance.
    #[arg(long, default_value_t = scenario::DEFAULT_TOL)]
    tol: f64,
    /// Resolution: boundary points (grow), grid points (curve), histogram cells per side (sample).
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PotentialArg {
    Gaussian,
    Monomial,
    Cubic,
    Log,
}

#[derive(Debug, Args)]
struct PotentialArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    potential: PotentialArg,
    /// Degree of the monomial potential.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Gaussian coefficient (default 0.2).
    #[arg(long, allow_hyphen_values = true)]
    t2: Option<f64>,
    /// Cubic coefficient (default 1/6).
    #[arg(long, allow_hyphen_values = true)]
    t3: Option<f64>,
    /// Monomial coefficient (default 1/((n-1)n)).
    #[arg(long, allow_hyphen_values = true)]
    tn: Option<f64>,
    /// Imaginary part of the coefficient.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t_im: f64,
    /// Log-potential strength (negative).
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    alpha: f64,
    /// Log-potential pole position (real).
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    beta: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Laplacian growth of the droplet at fixed harmonic moments.
    Grow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        potential: PotentialArgs,
        /// Area quantum; step j has t0 = j hbar.
        #[arg(long, default_value_t = 0.01)]
        hbar: f64,
        #[arg(long, default_value_t = scenario::DEFAULT_STEPS)]
        steps: usize,
    },
    /// String-equation recurrence for the Gaussian or cubic potential.
    Lattice {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cubic")]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true)]
        t2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t3: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        hbar: f64,
        /// Lattice size (default: the critical site for cubic, t0/hbar for Gaussian).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
    },
    /// Pole-free Painleve I solution.
    Painleve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = scenario::DEFAULT_NU_START, allow_hyphen_values = true)]
        nu_start: f64,
        #[arg(long, default_value_t = scenario::DEFAULT_NU_END, allow_hyphen_values = true)]
        nu_end: f64,
    },
    /// Branch points of the full, degenerate and singular spectral curves.
    Curve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = scenario::DEFAULT_NU_START, allow_hyphen_values = true)]
        nu_start: f64,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        nu_end: f64,
    },
    /// Metropolis sample of the eigenvalue distribution.
    Sample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        potential: PotentialArgs,
        /// Number of eigenvalues; hbar = t0 / n.
        #[arg(long, default_value_t = scenario::DEFAULT_N_EIG)]
        n_eig: usize,
        #[arg(long, default_value_t = scenario::DEFAULT_SWEEPS)]
        sweeps: usize,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
    },
    /// Data and SVG renderings for every figure.
    ReportAll {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = scenario::DEFAULT_SWEEPS)]
        sweeps: usize,
    },
}

fn base(kind: ScenarioKind, common: &Common) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind);
    cfg.out = common.out.clone();
    cfg.numeric.seed = common.seed;
    cfg.numeric.tol = common.tol;
    cfg.numeric.points = common.points;
    cfg
}

fn apply_potential(cfg: &mut ScenarioConfig, p: &PotentialArgs) {
    let pc = &mut cfg.potential;
    match p.potential {
        PotentialArg::Gaussian => {
            pc.kind = PotentialType::Gaussian;
            pc.t = p.t2;
        }
        PotentialArg::Monomial => {
            pc.kind = PotentialType::Monomial;
            pc.n = p.n;
            pc.t = p.tn.or(if p.n == 3 { p.t3 } else { None });
        }
        PotentialArg::Cubic => {
            pc.kind = PotentialType::Monomial;
            pc.n = 3;
            pc.t = p.t3.or(p.tn);
        }
        PotentialArg::Log => pc.kind = PotentialType::Log,
    }
    pc.t_im = p.t_im;
    pc.alpha = p.alpha;
    pc.beta = p.beta;
}

fn to_config(cmd: Command) -> ScenarioConfig {
    match cmd {
        Command::Grow { common, potential, hbar, steps } => {
            let mut c = base(ScenarioKind::Grow, &common);
            apply_potential(&mut c, &potential);
            c.potential.hbar = Some(hbar);
            c.numeric.steps = steps;
            c
        }
        Command::Lattice { common, potential, t2, t3, hbar, n_max, t0 } => {
            let mut c = base(ScenarioKind::Lattice, &common);
            match potential {
                PotentialArg::Gaussian => {
                    c.potential.kind = PotentialType::Gaussian;
                    c.potential.t = t2;
                }
                _ => {
                    c.potential.kind = PotentialType::Monomial;
                    c.potential.n = 3;
                    c.potential.t = t3;
                }
            }
            c.potential.hbar = Some(hbar);
            c.numeric.n_max = n_max;
            c.numeric.t0 = t0;
            c
        }
        Command::Painleve { common, nu_start, nu_end } => {
            let mut c = base(ScenarioKind::Painleve, &common);
            c.numeric.nu_start = nu_start;
            c.numeric.nu_end = nu_end;
            c
        }
        Command::Curve { common, nu_start, nu_end } => {
            let mut c = base(ScenarioKind::Curve, &common);
            c.numeric.nu_start = nu_start;
            c.numeric.nu_end = nu_end;
            c
        }
        Command::Sample { common, potential, n_eig, sweeps, t0 } => {
            let mut c = base(ScenarioKind::Sample, &common);
            apply_potential(&mut c, &potential);
            c.numeric.n_eig = n_eig;
            c.numeric.sweeps = sweeps;
            c.numeric.t0 = t0;
            c
        }
        Command::ReportAll { common, sweeps } => {
            let mut c = base(ScenarioKind::ReportAll, &common);
            c.numeric.sweeps = sweeps;
            c
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    let doc = serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}});
    eprintln!("{doc}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match (cli.command, cli.config) {
        (Some(cmd), None) => to_config(cmd),
        (None, Some(path)) => match ScenarioConfig::load(&path) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        (Some(_), Some(_)) => {
            return fail(&Error::Config("--config cannot be combined with a subcommand".into()));
        }
        (None, None) => {
            let _ = Cli::command().write_help(&mut std::io::stderr());
            return ExitCode::from(2);
        }
    };
    match scenario::run_scenario(&config) {
        Ok(m) => {
            let doc = serde_json::json!({
                "scenario": m.scenario,
                "out": config.out,
                "files": m.files.len(),
            });
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
