//! `twb`: survival times, figure data and oracle checks for twin beams in
//! squeezed-thermal channels.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twb_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "twb",
    version,
    about = "Twin-beam entanglement in squeezed-thermal Gaussian channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entanglement survival time t_s, thermal reference t_0 and G = (t_s - t_0)/t_0.
    ///
    /// Times are in units of 1/Γ unless --gamma is given, in which case they
    /// are physical times for damping rate Γ = gamma.
    Survival(SurvivalArgs),
    /// G as a function of n_s for a list of λ at fixed n_th (CSV columns
    /// lambda,n_th,n_s,t_s,t_0,G). Times in units of 1/Γ.
    Fig1(Fig1Args),
    /// Samples of the characteristic polynomial q_S(x) = det(S - xI) at
    /// e^{-Γt} = --exp-gt, plus its four roots.
    Charpoly(CharpolyArgs),
    /// Covariance matrix of the evolved twin beam at time --t (units of 1/Γ
    /// unless --gamma is given) or at e^{-Γt} = --exp-gt.
    Evolve(EvolveArgs),
    /// Compare the Gaussian solution with the truncated Fock-space master
    /// equation at time --t (units of 1/Γ unless --gamma is given).
    OracleCompare(OracleArgs),
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// Twin-beam squeezing λ (ξ = tanh λ).
    #[arg(long = "lambda", allow_negative_numbers = true)]
    lambda: f64,
    /// Thermal photon number of the bath.
    #[arg(long = "nth", default_value_t = 0.0, allow_negative_numbers = true)]
    n_th: f64,
    /// Squeezing photon number of the bath, sinh²|ζ|.
    #[arg(long = "ns", default_value_t = 0.0, allow_negative_numbers = true)]
    n_s: f64,
    /// Bath squeezing phase in radians; accepts forms like pi/5 or 2pi/5.
    #[arg(long, default_value = "0", value_parser = format::parse_angle, allow_hyphen_values = true)]
    theta: f64,
    /// Damping rate Γ. When given, times are physical (Γt divided by gamma);
    /// otherwise all times are dimensionless Γt.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SurvivalArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct Fig1Args {
    /// Thermal photon number of the bath.
    #[arg(long = "nth", allow_negative_numbers = true)]
    n_th: f64,
    /// Comma-separated twin-beam parameters.
    #[arg(
        long = "lambda",
        value_delimiter = ',',
        default_value = "0.1,0.25,0.4,0.55,0.7,0.85,1.0"
    )]
    lambdas: Vec<f64>,
    /// First n_s sample.
    #[arg(long, default_value_t = 0.02)]
    ns_start: f64,
    /// Last n_s sample.
    #[arg(long, default_value_t = 1.0)]
    ns_stop: f64,
    /// Number of n_s samples; 0 gives a header-only table.
    #[arg(long, default_value_t = 50)]
    ns_count: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CharpolyArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// e^{-Γt} at which S is evaluated, in (0, 1].
    #[arg(long = "exp-gt", default_value_t = 0.55)]
    exp_gt: f64,
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 1.6, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 181)]
    x_count: usize,
    /// Where to write the roots sidecar (JSON). Defaults to <out>.roots.json
    /// when --out is given; otherwise the sidecar goes to standard error.
    #[arg(long)]
    roots_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Evolution time (Γt unless --gamma is given).
    #[arg(long, conflicts_with = "exp_gt", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Alternative time specification via e^{-Γt}.
    #[arg(long = "exp-gt")]
    exp_gt: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Evolution time (Γt unless --gamma is given).
    #[arg(long, conflicts_with = "exp_gt", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Alternative time specification via e^{-Γt}.
    #[arg(long = "exp-gt")]
    exp_gt: Option<f64>,
    /// Per-mode Fock cutoff d.
    #[arg(long, default_value_t = 25)]
    cutoff: usize,
    /// RK4 step in units of 1/Γ.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Largest acceptable trace leakage through the cutoff.
    #[arg(long, default_value_t = 1e-6)]
    trunc_tol: f64,
    /// Pass threshold on the largest covariance discrepancy.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain() => 2,
            CliError::Core(_) => 3,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        let raw = match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
            CliError::Io(e) => format!("i/o: {e}"),
        };
        raw.replace('\n', " ")
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Survival(a) => commands::survival(&a.channel, &a.output),
        Command::Fig1(a) => commands::fig1(&a),
        Command::Charpoly(a) => commands::charpoly(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::OracleCompare(a) => commands::oracle_compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
