//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 solver
//! failure, 3 comparison above threshold.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sbp_ins::basis::ReferenceElement;
use sbp_ins::cases::{compare_run, run_case, CaseConfig};
use sbp_ins::mesh::{cosine_stretched_edges_on, uniform_edges};
use sbp_ins::mms::{convergence_csv, convergence_sweep, MmsField, MmsRunSettings};
use sbp_ins::sbp::metric_scaled_operators;
use sbp_ins::sparse::{diag, SparseMatrix};
use sbp_ins::time::NewtonSettings;
use sbp_ins::Error;

#[derive(Parser)]
#[command(name = "sbp-ins", version, about = "SBP-SAT continuous Galerkin solver for incompressible flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence table as CSV on stdout.
    VerifyMms {
        /// All degrees on 13, 25, 37 and 49 nodes up to t = 0.4.
        #[arg(long)]
        full_table: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the case described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Benchmark resolutions instead of the desk-scale defaults.
        #[arg(long)]
        paper_scale: bool,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Compares a finished run against a reference profile CSV.
    Compare {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        threshold: f64,
    },
    /// Writes the 1D operators as coordinate-list CSV.
    DumpOperators {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        elements: usize,
        /// Cosine-stretched element edges on [0, 1].
        #[arg(long)]
        stretched: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Error(Error),
    Threshold(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        }),
        None => {
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn coo(out: &mut String, name: &str, m: &SparseMatrix) {
    for (&v, (i, j)) in m.iter() {
        out.push_str(&format!("{name},{i},{j},{v:.17e}\n"));
    }
}

fn dump_operators(degree: usize, elements: usize, stretched: bool) -> Result<String, Error> {
    let reference = ReferenceElement::new(degree)?;
    let edges = if stretched {
        cosine_stretched_edges_on(elements, 0.0, 1.0)?
    } else {
        uniform_edges(elements, 0.0, 1.0)?
    };
    let ops = metric_scaled_operators(&reference, &edges)?;
    let mut out = String::from("matrix,row,col,value\n");
    coo(&mut out, "P", &diag(&ops.mass));
    coo(&mut out, "Q", &ops.qx);
    coo(&mut out, "D", &ops.dx);
    coo(&mut out, "B", &diag(&ops.boundary));
    coo(&mut out, "Qxx", &ops.qxx);
    coo(&mut out, "Dxx", &ops.dxx);
    coo(&mut out, "Qxx_assembled", &ops.qxx_assembled);
    coo(&mut out, "Dxx_assembled", &ops.dxx_assembled);
    Ok(out)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::VerifyMms { full_table, output } => {
            let field = MmsField::default();
            let base = MmsRunSettings {
                newton: NewtonSettings {
                    reuse_jacobian: true,
                    ..NewtonSettings::default()
                },
                ..MmsRunSettings::default()
            };
            let rows = if full_table {
                let settings = MmsRunSettings { end_time: 0.4, ..base };
                convergence_sweep(field, &[1, 2, 3, 4], &[13, 25, 37, 49], &settings)?
            } else {
                let settings = base;
                let mut rows = convergence_sweep(field, &[1, 2, 3, 4], &[13, 25], &settings)?;
                rows.extend(convergence_sweep(field, &[4], &[37, 49], &settings)?);
                rows
            };
            emit(&convergence_csv(&rows), output.as_ref())?;
        }
        Command::Run {
            config,
            paper_scale,
            output_dir,
        } => {
            let mut cfg = CaseConfig::from_file(&config)?;
            if paper_scale {
                cfg = cfg.paper_scale();
            }
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let summary = run_case(&cfg)?;
            let m = &summary.metadata;
            println!(
                "{}: {} steps to t = {:.6}, steady = {}, output in {}",
                m.case,
                m.steps,
                m.time,
                m.steady,
                summary.dir.display()
            );
            for c in &summary.comparisons {
                println!("{c}");
            }
        }
        Command::Compare {
            run,
            reference,
            threshold,
        } => {
            if !(threshold.is_finite() && threshold > 0.0) {
                return Err(Error::InvalidInput(format!("threshold must be positive, got {threshold}")).into());
            }
            let report = compare_run(&run, &reference)?;
            println!("{report}");
            if report.max_abs_deviation > threshold {
                return Err(Failure::Threshold(format!(
                    "max deviation {:.4e} exceeds threshold {threshold}",
                    report.max_abs_deviation
                )));
            }
        }
        Command::DumpOperators {
            degree,
            elements,
            stretched,
            output,
        } => emit(&dump_operators(degree, elements, stretched)?, output.as_ref())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
    }
}
