//! `khessian`: bounds tables, eigenvalue solves, sweeps, gap analysis,
//! Rayleigh quotients and limit tables for k-Hessian eigenvalues of the unit
//! ball.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 convergence
//! failure.

mod commands;
mod output;
mod ranges;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use khessian_core::SolverConfig;

use commands::{CliError, Outcome, ProfileSpec};
use output::Format;

#[derive(Parser)]
#[command(
    name = "khessian",
    version,
    about = "k-Hessian eigenvalues of the unit ball"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Number of uniform grid intervals.
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Sets both --tol-lambda and --tol-profile.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tol_lambda: Option<f64>,
    #[arg(long)]
    tol_profile: Option<f64>,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    quad_tol: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let base = SolverConfig::default();
        let cfg = SolverConfig {
            grid_size: self.grid,
            tol_lambda: self.tol_lambda.or(self.tol).unwrap_or(base.tol_lambda),
            tol_profile: self.tol_profile.or(self.tol).unwrap_or(base.tol_profile),
            max_iters: self.max_iters,
            quad_tol: self.quad_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// All closed-form bounds for each (k, n).
    Bounds {
        /// k values: `2`, `1..4` or `1,3,5`.
        #[arg(long)]
        k: String,
        /// n values, same syntax.
        #[arg(long)]
        n: String,
        /// Use the logarithmic Hölder bound at n = 2k.
        #[arg(long)]
        log_variant: bool,
        #[arg(long, default_value_t = 1e-12)]
        quad_tol: f64,
    },
    /// Solve one eigenvalue problem.
    Solve {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the eigenfunction as CSV `r,u,u_prime`.
        #[arg(long)]
        dump_profile: Option<PathBuf>,
        /// Exit 0 even if the iteration did not converge.
        #[arg(long)]
        allow_unconverged: bool,
    },
    /// Solve many (k, n) pairs, in input order.
    Sweep {
        /// CSV file with header `k,n`.
        #[arg(long, conflicts_with_all = ["k", "n", "diagonal"])]
        pairs: Option<PathBuf>,
        /// k values (combined with --n, keeping k <= n).
        #[arg(long, requires = "n")]
        k: Option<String>,
        #[arg(long, requires = "k")]
        n: Option<String>,
        /// n values; solves (n, n).
        #[arg(long, conflicts_with_all = ["k", "n"])]
        diagonal: Option<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Exit 3 if any pair fails to converge.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Distance of Monge–Ampère eigenfunctions to the cone.
    Gap {
        /// n values, e.g. `10,20,40`.
        #[arg(long)]
        n_list: String,
        /// Exit 3 if any solve fails to converge.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Rayleigh quotient of a test profile.
    Rayleigh {
        /// `cone`, `cone(eps)`, `quadratic` or `file:<path>`.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Smoothing for `cone`; 0 keeps the exact cone.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Grid for the admissibility check of analytic profiles.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 1e-12)]
        quad_tol: f64,
    },
    /// Diagonal lower floor and upper-bound root for n = 2..n_max.
    Limits {
        #[arg(long)]
        n_max: u32,
    },
}

fn list(spec: &str) -> Result<Vec<u32>, CliError> {
    ranges::parse_list(spec).map_err(CliError::Usage)
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bounds {
            k,
            n,
            log_variant,
            quad_tol,
        } => commands::bounds(&list(&k)?, &list(&n)?, log_variant, quad_tol),
        Command::Solve {
            k,
            n,
            solver,
            dump_profile,
            allow_unconverged,
        } => commands::solve_one(
            k,
            n,
            &solver.config()?,
            dump_profile.as_deref(),
            allow_unconverged,
        ),
        Command::Sweep {
            pairs,
            k,
            n,
            diagonal,
            jobs,
            strict,
            solver,
        } => {
            let cfg = solver.config()?;
            let pairs = match (pairs, k, n, diagonal) {
                (Some(path), ..) => commands::read_pairs(&path)?,
                (None, Some(k), Some(n), None) => {
                    let ks = list(&k)?;
                    list(&n)?
                        .into_iter()
                        .flat_map(|n| ks.iter().filter(move |&&k| k <= n).map(move |&k| (k, n)))
                        .collect()
                }
                (None, None, None, Some(d)) => list(&d)?.into_iter().map(|n| (n, n)).collect(),
                _ => {
                    return Err(CliError::Usage(
                        "give one of --pairs, --k with --n, or --diagonal".into(),
                    ))
                }
            };
            match jobs {
                Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()
                    .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
                    .install(|| commands::sweep_pairs(&pairs, &cfg, strict)),
                None => commands::sweep_pairs(&pairs, &cfg, strict),
            }
        }
        Command::Gap {
            n_list,
            strict,
            solver,
        } => commands::gap(&list(&n_list)?, &solver.config()?, strict),
        Command::Rayleigh {
            profile,
            k,
            n,
            epsilon,
            grid,
            quad_tol,
        } => commands::rayleigh(
            &ProfileSpec::parse(&profile, epsilon)?,
            k,
            n,
            grid,
            quad_tol,
        ),
        Command::Limits { n_max } => commands::limits(n_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let comment = format!("khessian {} {}", env!("CARGO_PKG_VERSION"), args.join(" "));
    match run(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.table.render(cli.format, &comment));
            match outcome.convergence_failure {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
