use std::path::PathBuf;
use std::process::ExitCode;

use bergman_lab::config::{parse_list, parse_measure, parse_weight, ConfigError};
use bergman_lab::{run, RunConfig, Subcommand};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    /// Build an r-lattice and certify it
    Lattice,
    /// Build the kernel model and check the kernel estimates
    Kernel,
    /// B_p and C_p constants of the weight
    Weights,
    /// Berezin, t-Berezin and averaging profiles
    Berezin,
    /// Toeplitz matrix, spectrum, trace check and essential norm
    Toeplitz,
    /// One index or the theorem consistency matrix
    Criteria,
    /// Schatten integral and membership trend
    Schatten,
    /// The full acceptance suite
    Verify,
}

#[derive(Parser, Debug)]
#[command(name = "bergman-lab", version, about = "Numerical experiments on Toeplitz operators in weighted Bergman spaces")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated values of p
    #[arg(long)]
    p: Option<String>,
    /// Values of q
    #[arg(long)]
    q: Option<String>,
    /// Berezin exponents t
    #[arg(long)]
    t: Option<String>,
    /// Pseudohyperbolic radii r
    #[arg(long)]
    r: Option<String>,
    /// Values of s
    #[arg(long)]
    s: Option<String>,
    /// Kernel model degree N
    #[arg(long)]
    degree: Option<usize>,
    /// Outer radius of profiles and the lattice
    #[arg(long)]
    rmax: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Measure shorthand, e.g. power_density:0.4 or atomic:[[0,0,2]]
    #[arg(long)]
    measure: Option<String>,
    /// Weight shorthand, e.g. constant, standard:1 or power_one_minus_z:0.5
    #[arg(long)]
    weight: Option<String>,
    /// Index for `criteria`
    #[arg(long)]
    criterion: Option<String>,
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut c = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for (field, value, slot) in [
        ("--p", &cli.p, &mut c.sweep.p),
        ("--q", &cli.q, &mut c.sweep.q),
        ("--t", &cli.t, &mut c.sweep.t),
        ("--r", &cli.r, &mut c.sweep.r),
        ("--s", &cli.s, &mut c.sweep.s),
    ] {
        if let Some(v) = value {
            *slot = parse_list(field, v)?;
        }
    }
    if let Some(n) = cli.degree {
        c.degree = n;
    }
    if let Some(r) = cli.rmax {
        c.r_max = r;
    }
    if let Some(out) = &cli.out {
        c.out = out.clone();
    }
    if let Some(m) = &cli.measure {
        c.measure = parse_measure(m)?;
    }
    if let Some(w) = &cli.weight {
        c.weight = parse_weight(w)?;
    }
    if let Some(k) = &cli.criterion {
        c.criterion = serde_json::from_value(serde_json::Value::String(k.clone()))
            .map_err(|e| ConfigError::new("--criterion", e.to_string()))?;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bergman-lab: invalid config: {e}");
            return ExitCode::from(2);
        }
    };
    let sub = match cli.command {
        Command::Lattice => Subcommand::Lattice,
        Command::Kernel => Subcommand::Kernel,
        Command::Weights => Subcommand::Weights,
        Command::Berezin => Subcommand::Berezin,
        Command::Toeplitz => Subcommand::Toeplitz,
        Command::Criteria => Subcommand::Criteria,
        Command::Schatten => Subcommand::Schatten,
        Command::Verify => Subcommand::Verify,
    };
    match run(sub, &config) {
        Ok(summary) => {
            print!("{}", summary.text);
            println!("artifacts under {}", config.out.join(sub.name()).display());
            if summary.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bergman-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
