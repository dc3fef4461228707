mod commands;
mod config;
mod input;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CliError, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "parahoric",
    version,
    about = "Root data, torsion centralizers, Chevalley lifts and order polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root datum, affine diagram and fundamental group of each type in scope.
    Build(Common),
    /// Maximal facets whose reductive quotient has disconnected center.
    Atlas(AtlasArgs),
    /// Pseudo-Levi subsystems of torsion points.
    PseudoLevi(PointArgs),
    /// Component groups `W_s / W(Phi_H)` of torsion points.
    ComponentGroup(PointArgs),
    /// Certificate suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Formal-degree exponents, conductors and order-polynomial quotients.
    Fdeg(PointArgs),
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Tits lifts around the highest root and minimal-element counts.
    Lemmas(Common),
    /// Pinning-preserving lifts of `Omega_{G,F}` on maximal facets.
    Pinning(AtlasArgs),
    /// Kottwitz square for `Omega_H -> Omega_G`.
    Kottwitz(PointArgs),
    /// Induced affine root systems of pseudo-Levi subsystems.
    Apartment(PointArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsogenyArg {
    Adjoint,
    #[value(alias = "sc")]
    SimplyConnected,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Families to include (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    family: Vec<String>,
    /// Exact ranks to include (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    rank: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    max_rank: usize,
    /// Twist orders of quasi-split forms (1, 2 or 3).
    #[arg(long, value_delimiter = ',')]
    twist: Vec<u8>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = parahoric::verify::DEFAULT_SEED)]
    seed: u64,
    /// Largest Weyl group enumerated element by element.
    #[arg(long, default_value_t = parahoric::centralizer::DEFAULT_WEYL_GUARD)]
    weyl_guard: usize,
    /// Largest adjoint dimension handled; bigger types are reported not computed.
    #[arg(long, default_value_t = 248)]
    max_dim: usize,
    /// Wall-clock budget in seconds; jobs not started in time are reported not computed.
    #[arg(long)]
    time_limit: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct AtlasArgs {
    #[command(flatten)]
    common: Common,
    /// Inner-twist nodes to include; default all.
    #[arg(long, value_delimiter = ',')]
    inner: Vec<usize>,
    /// JSON form file; replaces the type filters.
    #[arg(long)]
    form: Option<std::path::PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = IsogenyArg::Adjoint)]
    isogeny: IsogenyArg,
    /// Largest torsion order enumerated over the alcove.
    #[arg(long, default_value_t = 3)]
    order: i64,
    /// JSON file of Kac points; replaces enumeration.
    #[arg(long)]
    kac: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(config::EXIT_USAGE),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    let config = RunConfig::from_command(&command)?;
    let outcome = match &command {
        Command::Build(_) => commands::build(&config)?,
        Command::Atlas(a) => commands::atlas(&config, a.form.as_deref())?,
        Command::PseudoLevi(p) => commands::pseudo_levi(&config, p.kac.as_deref())?,
        Command::ComponentGroup(p) => commands::component_group(&config, p.kac.as_deref())?,
        Command::Verify { suite } => match suite {
            Suite::Lemmas(_) => commands::lemmas(&config)?,
            Suite::Pinning(a) => commands::pinning(&config, a.form.as_deref())?,
            Suite::Kottwitz(p) => commands::kottwitz(&config, p.kac.as_deref())?,
            Suite::Apartment(p) => commands::apartment(&config, p.kac.as_deref())?,
        },
        Command::Fdeg(p) => commands::fdeg(&config, p.kac.as_deref())?,
    };
    report::emit(&config, outcome)
}
