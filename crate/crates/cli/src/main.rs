//! `glslab`: batch front end for graded linear series in the monomial model.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glslab_core::intersection::OracleMode;
use glslab_core::series::ReadSpecError;
use glslab_core::Strategy;

use commands::{Command, OracleParams, RunConfig};
use report::Format;

const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] ReadSpecError),
    #[error("series violates multiplicativity: {0}")]
    InvalidSeries(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] glslab_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Parser)]
#[command(name = "glslab", version, about = "Invariants of graded linear series in the monomial model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse the spec and check S_k + S_l ⊆ S_(k+l).
    Validate(Common),
    /// dim V_m and basepoint freeness per degree.
    Table(Common),
    /// Per-degree lattice invariants and their stable values.
    Invariants(Common),
    /// κ-volume terms κ!·dim V_m / m^κ.
    Volume(Common),
    /// deg φ_m, deg ν_m and the asymptotic degree.
    Degree(Common),
    /// Moving intersection numbers with a subtorus.
    Movint {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        z: SubtorusArg,
    },
    /// Run every identity check and exit 3 on any failure.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        z: SubtorusArg,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Finite-field root counts for generic members of |V_m| on Z.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        z: SubtorusArg,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Degree m; defaults to the first degree with a nondegenerate hull.
        #[arg(long)]
        m: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    #[arg(long, default_value_t = 16)]
    bound: u64,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Directory for cached slices.
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Defaults to text for validate and verify, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Compute even when multiplicativity fails.
    #[arg(long)]
    force: bool,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SubtorusArg {
    /// Integer matrix B with rows separated by ';', e.g. "2 3" or "1 0; 0 1".
    #[arg(long, value_parser = commands::parse_matrix)]
    subtorus: Option<glslab_core::lattice::IntMatrix>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 10007)]
    prime: u64,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Count F_p-rational zeros by exhaustive search instead of zeros over
    /// the algebraic closure.
    #[arg(long)]
    rational: bool,
}

impl Cli {
    fn into_config(self) -> (RunConfig, Option<PathBuf>, Format) {
        let default_oracle = OracleArgs { prime: 10007, trials: 20, seed: 0, rational: false };
        let (command, common, z, oracle, degree) = match self.command {
            Cmd::Validate(c) => (Command::Validate, c, None, default_oracle, None),
            Cmd::Table(c) => (Command::Table, c, None, default_oracle, None),
            Cmd::Invariants(c) => (Command::Invariants, c, None, default_oracle, None),
            Cmd::Volume(c) => (Command::Volume, c, None, default_oracle, None),
            Cmd::Degree(c) => (Command::Degree, c, None, default_oracle, None),
            Cmd::Movint { common, z } => (Command::Movint, common, z.subtorus, default_oracle, None),
            Cmd::Verify { common, z, oracle } => (Command::Verify, common, z.subtorus, oracle, None),
            Cmd::Oracle { common, z, oracle, m } => (Command::Oracle, common, z.subtorus, oracle, m),
        };
        let format = common.format.unwrap_or(match command {
            Command::Validate | Command::Verify => Format::Text,
            _ => Format::Csv,
        });
        let cfg = RunConfig {
            spec_path: common.spec,
            command,
            bound: common.bound,
            subtorus: z,
            oracle: OracleParams {
                prime: oracle.prime,
                trials: oracle.trials,
                seed: oracle.seed,
                mode: if oracle.rational { OracleMode::Rational } else { OracleMode::Closure },
            },
            degree,
            cache_dir: common.cache,
            force: common.force,
            strategy: if common.sequential { Strategy::Sequential } else { Strategy::default() },
        };
        (cfg, common.out, format)
    }
}

fn run(cfg: &RunConfig, out: Option<&PathBuf>, format: Format) -> Result<bool, CliError> {
    let report = commands::execute(cfg)?;
    let text = report.render(format);
    match out {
        Some(path) => report::write_atomic(path, &text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{text}"),
    }
    Ok(!report.failed())
}

fn main() -> ExitCode {
    let (cfg, out, format) = Cli::parse().into_config();
    match run(&cfg, out.as_ref(), format) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("glslab: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
