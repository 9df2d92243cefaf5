use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transmute::commands::{cmd_beta, cmd_kernel, cmd_spectrum, cmd_validate, EXIT_INPUT};
use transmute::config::{Overrides, RunConfig};
use transmute::parallel::build_pool;

/// Transmutation kernels, regular solutions and Dirichlet spectra for
/// perturbed Bessel equations.
#[derive(Parser)]
#[command(name = "transmute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the Fourier-Legendre coefficients beta_k(x).
    Beta(Common),
    /// Tabulate the kernel K_N(x, t).
    Kernel(Common),
    /// Dirichlet eigenvalues u(omega, b) = 0.
    Spectrum(Common),
    /// Run the invariant suite.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// zero, poly:c0,c1,... or table:PATH
    #[arg(long)]
    potential: Option<String>,
    /// Number of eigenvalues.
    #[arg(long)]
    count: Option<usize>,
    /// Truncation order of u_N and K_N, or "auto".
    #[arg(long = "N")]
    n: Option<String>,
    /// Truncation M of the beta fit.
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference eigenvalues: harmonic, ode, or an n,omega CSV.
    #[arg(long)]
    reference: Option<String>,
    /// Fault injection for validate: added to beta_{l+1}.
    #[arg(long)]
    perturb_beta: Option<f64>,
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            l: self.l,
            b: self.b,
            potential: self.potential.clone(),
            count: self.count,
            n: self.n.clone(),
            m: self.m,
            out: self.out.clone(),
            seed: self.seed,
            perturb_beta: self.perturb_beta,
            reference: self.reference.clone(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let pool = build_pool()?;
    let (common, f): (&Common, fn(&RunConfig) -> anyhow::Result<u8>) = match &cli.command {
        Command::Beta(c) => (c, cmd_beta),
        Command::Kernel(c) => (c, cmd_kernel),
        Command::Spectrum(c) => (c, cmd_spectrum),
        Command::Validate(c) => (c, cmd_validate),
    };
    let cfg = common.config()?;
    pool.install(|| f(&cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
