use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simlab_cli::runner::{self, EXIT_ASSERTION, EXIT_SCHEMA};
use simlab_cli::scenario::{builtin, Scenario, BUILTIN_NAMES};

/// Reaction-diffusion symmetry laboratory.
#[derive(Parser)]
#[command(name = "simlab", version)]
struct Cli {
    /// worker threads for the solver sweeps (default: all cores); results
    /// are bitwise identical for any value
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write its report bundle.
    Run {
        /// path to a scenario JSON file, or the name of a built-in scenario
        #[arg(long)]
        config: String,
        /// output directory for the report bundle
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the thin-annulus eigenvalues as `k,eps,j,lambda` CSV.
    Eigen {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        jmax: usize,
    },
    /// Build the first-order bifurcation branch state and its residual.
    Branch {
        #[arg(long)]
        k: u32,
        /// branch amplitude t
        #[arg(long)]
        amp: f64,
        /// annulus thinness; located via the bifurcation search when omitted
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 64)]
        n_r: usize,
        #[arg(long, default_value_t = 256)]
        n_theta: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// List the built-in scenarios.
    List,
}

fn load_scenario(config: &str) -> Result<Scenario, String> {
    if let Some(sc) = builtin(config) {
        return Ok(sc);
    }
    let bytes = std::fs::read(config)
        .map_err(|e| format!("cannot read config '{config}': {e}"))?;
    serde_json::from_slice(&bytes).map_err(|e| format!("invalid scenario JSON: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("FAIL threads: thread pool already initialized");
            return ExitCode::from(EXIT_SCHEMA as u8);
        }
    }
    let code = match cli.cmd {
        Cmd::Run { config, out } => match load_scenario(&config) {
            Ok(sc) => {
                let outcome = runner::run_scenario(&sc, &out);
                for line in &outcome.messages {
                    println!("{line}");
                }
                outcome.exit_code
            }
            Err(msg) => {
                eprintln!("FAIL schema: {msg}");
                EXIT_SCHEMA
            }
        },
        Cmd::Eigen { k, eps, n, jmax } => {
            let stdout = std::io::stdout();
            match runner::eigen_csv(&mut stdout.lock(), k, eps, n, jmax) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("FAIL eigen: {e}");
                    EXIT_ASSERTION
                }
            }
        }
        Cmd::Branch { k, amp, eps, n_r, n_theta, out } => {
            match runner::branch_bundle(&out, k, amp, eps, n_r, n_theta) {
                Ok((eps, lambda, sup_res)) => {
                    let mut w = std::io::stdout().lock();
                    writeln!(
                        w,
                        "k={} eps={} lambda={:.16e} sup_residual={:.16e}",
                        k, eps, lambda, sup_res
                    )
                    .ok();
                    0
                }
                Err(e) => {
                    eprintln!("FAIL branch: {e}");
                    EXIT_ASSERTION
                }
            }
        }
        Cmd::List => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            0
        }
    };
    ExitCode::from(code as u8)
}
