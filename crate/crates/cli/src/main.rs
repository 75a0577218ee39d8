//! `wavedg` command-line front end.
//!
//! Exit status: 0 on success, 1 when a run or check fails, 2 on bad input.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use spec::{InputError, SpecOptions};

#[derive(Parser)]
#[command(name = "wavedg", version, about = "DG blow-up solver for the 1D semilinear wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case to blow-up; writes history.csv and summary.json.
    Run(SpecOptions),
    /// Blow-up times of DG and FD over a sequence of meshes.
    Convergence {
        #[command(flatten)]
        spec: SpecOptions,
        /// Mesh exponents e, h = (b - a)/2^e.
        #[arg(long, value_delimiter = ',', default_values_t = [5u32, 6, 7, 8, 9])]
        exponents: Vec<u32>,
    },
    /// Error tables and monitored blow-up run of a benchmark case.
    Benchmark {
        #[command(flatten)]
        spec: SpecOptions,
        /// Comparator grid ratio for case 4.
        #[arg(long, default_value_t = 16)]
        fd_refinement: usize,
    },
    /// First-crossing times of the levels R at every node.
    XiCurve {
        #[command(flatten)]
        spec: SpecOptions,
        #[arg(long, value_delimiter = ',', default_values_t = [300.0, 600.0, 1200.0])]
        levels: Vec<f64>,
    },
    /// Seeded property suite.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturbs the basis integrals of this degree before the table check.
        #[arg(long, hide = true)]
        corrupt_alpha: Option<usize>,
    },
    /// Reference-element matrices as JSON.
    DumpMatrices {
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Scale to a physical cell of this width.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Run(spec) => commands::cmd_run(&spec.resolve()?),
        Command::Convergence { spec, exponents } => commands::cmd_convergence(&spec.resolve()?, &exponents),
        Command::Benchmark { spec, fd_refinement } => commands::cmd_benchmark(&spec.resolve()?, fd_refinement),
        Command::XiCurve { spec, levels } => commands::cmd_xi_curve(&spec.resolve()?, &levels),
        Command::Validate { seed, corrupt_alpha } => commands::cmd_validate(seed, corrupt_alpha),
        Command::DumpMatrices { k, h, out } => commands::cmd_dump_matrices(k, h, out),
    }
}

/// Input problems exit with 2, everything else with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<wavedg::Error>() {
        Some(
            wavedg::Error::InvalidParameter { .. }
            | wavedg::Error::DegreeOutOfRange(_)
            | wavedg::Error::Shape(_)
            | wavedg::Error::CflViolation { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
