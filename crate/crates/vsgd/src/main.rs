//! Thin command-line front end over the library harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 divergence-only
//! failure.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vsgd::harness::{
    self, c_sweep, compare, emit_csv, emit_grid_csv, final_test_errors, grid_search, parse_csv,
    quad_demo, BenchError, CompareOutcome, QuadDemoKind,
};

#[derive(Parser)]
#[command(
    name = "vsgd",
    about = "Variance-adaptive SGD experiments: training runs, grid searches, quadratic demos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment over its seeds and print a summary.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Dataset root for the MNIST/CIFAR tasks (else $VSGD_DATA_DIR).
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Write per-epoch traces to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive hyper-parameter search (2 seeds per setting).
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// Grid file: `preset = paper` or explicit value lists.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Full result table destination (default grid_results.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canned quadratic-world demos, written as CSV traces.
    QuadDemo {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Slow-start sensitivity sweep for the vSGD variants.
    CSweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated C values, e.g. `0.1,1,5.2,52,520`.
        #[arg(long)]
        values: String,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Welch-test comparison of the final test errors in two trace CSVs.
    Compare {
        csv_a: PathBuf,
        csv_b: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's own help/version output is a success, not a usage error.
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Train {
            config,
            data_dir,
            out,
        } => {
            let mut cfg = harness::parse_config_file(&config)?;
            if data_dir.is_some() {
                cfg.data_dir = data_dir;
            }
            let records = harness::run_experiment(&cfg)?;
            let stable: Vec<&harness::RunRecord> =
                records.iter().filter(|r| !r.diverged).collect();
            for r in &records {
                match (r.diverged, r.final_test_err()) {
                    (true, _) => println!("seed {:>3}: diverged", r.seed),
                    (false, Some(err)) => println!(
                        "seed {:>3}: train_err {:.4}  test_err {:.4}  [{} ms]",
                        r.seed,
                        r.final_train_err().unwrap_or(f64::NAN),
                        err,
                        r.wall_ms
                    ),
                    (false, None) => println!("seed {:>3}: no evaluations", r.seed),
                }
            }
            if !stable.is_empty() {
                let mean: f64 = stable
                    .iter()
                    .filter_map(|r| r.final_test_err())
                    .sum::<f64>()
                    / stable.len() as f64;
                println!(
                    "mean final test error over {} stable runs: {:.4}",
                    stable.len(),
                    mean
                );
            }
            if let Some(path) = out {
                emit_csv(&records, &path)?;
                println!("traces written to {}", path.display());
            }
            if stable.is_empty() {
                return Err(BenchError::AllDiverged);
            }
            Ok(())
        }
        Command::Grid {
            config,
            grid,
            data_dir,
            out,
        } => {
            let mut cfg = harness::parse_config_file(&config)?;
            if data_dir.is_some() {
                cfg.data_dir = data_dir;
            }
            let spec = harness::parse_grid_file(&grid)?;
            let outcome = grid_search(&spec, &cfg)?;
            let b = &outcome.best;
            println!(
                "best setting #{}: eta0={:?} gamma={:?} tau={:?} mu={:?}",
                outcome.best_index, b.hyper.eta0, b.hyper.gamma, b.hyper.tau, b.hyper.mu
            );
            println!(
                "mean test error {:.4}, mean train error {:.4} (2 seeds)",
                b.mean_test_err, b.mean_train_err
            );
            let path = out.unwrap_or_else(|| PathBuf::from("grid_results.csv"));
            emit_grid_csv(&outcome, &path)?;
            println!("full table written to {}", path.display());
            Ok(())
        }
        Command::QuadDemo { kind, out } => {
            let kind = QuadDemoKind::parse(&kind)?;
            quad_demo(kind, &out)?;
            println!("demo traces written to {}", out.display());
            Ok(())
        }
        Command::CSweep {
            config,
            values,
            data_dir,
            out,
        } => {
            let mut cfg = harness::parse_config_file(&config)?;
            if data_dir.is_some() {
                cfg.data_dir = data_dir;
            }
            let c_values = values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| BenchError::Usage(format!("bad C value '{v}'")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let table = c_sweep(&cfg, &c_values)?;
            for row in &table.rows {
                print!("C = {:>10}: instability {:.2}", row.c, row.instability);
                for (epoch, err) in &row.test_err_at {
                    print!("  err@{epoch} {err:.4}");
                }
                println!();
            }
            match table.critical_c() {
                Some(c) => println!("critical C (>=10% unstable): {c}"),
                None => println!("no C value reached 10% instability"),
            }
            if let Some(path) = out {
                table.emit_csv(&path)?;
                println!("sweep table written to {}", path.display());
            }
            Ok(())
        }
        Command::Compare { csv_a, csv_b, alpha } => {
            let a = final_test_errors(&parse_csv(&csv_a)?);
            let b = final_test_errors(&parse_csv(&csv_b)?);
            let report =
                compare(&a, &b, alpha).map_err(|e| BenchError::Usage(e.to_string()))?;
            println!(
                "mean A {:.6} (n={}), mean B {:.6} (n={})",
                report.mean_a,
                a.len(),
                report.mean_b,
                b.len()
            );
            println!(
                "Welch t = {:.4}, dof = {:.2}, p = {:.6}",
                report.t, report.dof, report.p_value
            );
            match report.outcome {
                CompareOutcome::ABetter => println!("verdict: A better (alpha = {alpha})"),
                CompareOutcome::BBetter => println!("verdict: B better (alpha = {alpha})"),
                CompareOutcome::Equivalent => println!("verdict: equivalent (alpha = {alpha})"),
            }
            Ok(())
        }
    }
}
