//! `rus` - batch front end for the repeat-until-success arithmetic
//! library.
//!
//! Subcommands:
//!
//! * `reproduce` - recompute a published comparison table side by side
//!   with its printed values and a match flag per cell;
//! * `simulate` - Monte Carlo statistics for a primitive or expression,
//!   with the analytic values for comparison;
//! * `sqwave` - fit a function with smoothed square waves and report the
//!   coefficients and error profile;
//! * `cost` - analytic cost reports for expressions, primitives, the
//!   classical baselines, and the caching trade-off.
//!
//! Reports go to stdout or `--out` as JSON (default) or CSV. A run is
//! fully determined by its resolved configuration: the same invocation
//! (including `--seed`) always produces byte-identical output.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, config, or
//! specs), 2 on numerical failures (singular solves, exhausted retry
//! budgets, domain violations) and I/O failures.

mod cost;
mod expr;
mod job;
mod reproduce;
mod simulate;
mod sqwave;

use clap::Parser;

use job::{Failure, JobConfig, Result};

#[derive(Parser)]
#[command(
    name = "rus",
    version,
    about = "Repeat-until-success arithmetic: tables, simulation, synthesis, costs"
)]
struct Cli {
    #[command(flatten)]
    globals: job::GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Recompute a published comparison table next to its printed values.
    Reproduce {
        /// Which table to recompute.
        #[arg(value_enum)]
        table: reproduce::TableId,
    },
    /// Monte Carlo statistics for a primitive or a composed expression.
    Simulate {
        /// What to run.
        #[arg(value_enum)]
        target: simulate::Target,
        /// Input angles for gb/par/paroaa.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
        /// Expression in prefix notation (or m4/m6/m8/r2), for expr.
        #[arg(long)]
        expr: Option<String>,
        /// Input values for the expression.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        inputs: Option<Vec<f64>>,
    },
    /// Fit a function with smoothed square waves.
    Sqwave {
        /// Function spec: reciprocal, poly:c0,c1,..., mesh:PATH, basis:J.
        fspec: String,
        /// Fit interval as lo,hi.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        interval: Option<Vec<f64>>,
        /// Number of basis waves.
        #[arg(long)]
        waves: Option<usize>,
        /// Gearbox recursion order of the basis waves.
        #[arg(long)]
        order: Option<u32>,
        /// Number of error-profile grid points.
        #[arg(long)]
        points: Option<usize>,
        /// Padding added to each side of the fit interval.
        #[arg(long)]
        padding: Option<f64>,
        /// Report errors over this interval instead of the fit interval.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eval_interval: Option<Vec<f64>>,
    },
    /// Analytic cost reports.
    Cost {
        #[command(subcommand)]
        cmd: cost::CostCmd,
    },
}

/// Converts an optional `lo,hi` flag into a validated pair.
fn interval_pair(name: &str, v: &Option<Vec<f64>>) -> Result<Option<(f64, f64)>> {
    match v {
        None => Ok(None),
        Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
        Some(_) => Err(Failure::Usage(format!("{name} expects exactly two values: lo,hi"))),
    }
}

fn run(command: Command, job: &JobConfig) -> Result<String> {
    match command {
        Command::Reproduce { table } => reproduce::run(table, job),
        Command::Simulate { target, angles, expr, inputs } => {
            let spec = simulate::SimulateSpec {
                target,
                angles: angles.unwrap_or_default(),
                expr_src: expr,
                inputs: inputs.unwrap_or_default(),
            };
            simulate::run(&spec, job)
        }
        Command::Sqwave { fspec, interval, waves, order, points, padding, eval_interval } => {
            let spec = sqwave::SqwaveSpec {
                fspec,
                interval: interval_pair("--interval", &interval)?
                    .unwrap_or(sqwave::DEFAULT_INTERVAL),
                waves: waves.unwrap_or(sqwave::DEFAULT_WAVES),
                order: order.unwrap_or(sqwave::DEFAULT_ORDER),
                points: points.unwrap_or(sqwave::DEFAULT_POINTS),
                padding,
                eval_interval: interval_pair("--eval-interval", &eval_interval)?,
            };
            sqwave::run(&spec, job)
        }
        Command::Cost { cmd } => cost::run(&cmd, job),
    }
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed; real
            // argument errors are usage failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let job = match job::resolve(&cli.globals) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(cli.command, &job).and_then(|text| job::emit(&job.out, &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(real_main());
}
