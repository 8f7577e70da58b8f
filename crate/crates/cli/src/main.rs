use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use transheat::runner::{self, Command as RunCommand, RunConfig};

/// Solver for u_xx - q(x) u = u_t on a rectangle: fits combinations of
/// transmuted heat polynomials to initial/boundary data by collocation, sums
/// the explicit series for noncharacteristic Cauchy data, and cross-checks
/// against a Crank-Nicolson finite-difference run.
#[derive(Parser)]
#[command(name = "transheat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Args)]
struct Shared {
    /// Problem file (see the problems/ directory for the format)
    file: PathBuf,
    /// Output directory for CSV artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the Chebyshev grid size from the file
    #[arg(long)]
    m: Option<usize>,
    /// Override the pseudoinverse cutoff from the file
    #[arg(long)]
    rcond: Option<f64>,
}

#[derive(Subcommand)]
enum Commands {
    /// Solve the initial-Dirichlet problem and write the solution mesh
    Solve(Shared),
    /// Sweep basis orders and write an error/conditioning table
    Table {
        #[command(flatten)]
        shared: Shared,
        /// Comma-separated basis orders to sweep
        #[arg(long = "N", value_delimiter = ',', default_value = "5,10,15,20,26")]
        orders: Vec<usize>,
    },
    /// Sum the explicit series for noncharacteristic Cauchy data
    Cauchy(Shared),
    /// Run the finite-difference reference solver and cross-compare
    Oracle(Shared),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (shared, command) = match cli.command {
        Commands::Solve(shared) => (shared, RunCommand::Solve),
        Commands::Table { shared, orders } => (shared, RunCommand::Table { orders }),
        Commands::Cauchy(shared) => (shared, RunCommand::Cauchy),
        Commands::Oracle(shared) => (shared, RunCommand::Oracle),
    };
    let config = RunConfig {
        out_dir: shared.out,
        grid_m: shared.m,
        rcond: shared.rcond,
        threads: runner::thread_cap_from_env(),
    };
    ExitCode::from(runner::run(&shared.file, command, &config) as u8)
}
