//! Monte Carlo statistics for the circuit primitives and for composed
//! expressions.
//!
//! Each trial runs one full repeat-until-success execution on its own
//! random stream (`RngStream::new(seed, trial)`), so the aggregate is
//! independent of evaluation order and reproducible byte-for-byte. The
//! report compares the empirical first-attempt success rate and the
//! distribution of consumed input rotations against the analytic values
//! where a closed form exists, and the CSV output is the rotation-count
//! histogram, ready for replotting cost-distribution curves.
//!
//! Trials that exhaust the attempt budget are counted in `exhaustion_rate`
//! and excluded from the rotation statistics; any other failure aborts the
//! command as a numerical error.

use serde::Serialize;

use rus_core::costs::{expr_rotation_cost, rus_repeat_cost, CostDist};
use rus_core::error::Error as CoreError;
use rus_core::primitives::{
    gb_angle, gb_success_prob, par_angle, par_success_prob, run_gb, run_par_oaa, run_par_on_zero,
    RunTrace,
};
use rus_core::rng::RngStream;
use rus_core::sim::new_state;
use rus_core::synth::{run_expr, RusExpr};

use crate::expr::parse_expr;
use crate::job::{self, Failure, Format, JobConfig, Result, SCHEMA_VERSION};

/// What to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    /// Gearbox circuit on a fresh register; angles are the inputs.
    Gb,
    /// PAR circuit on `|0>` with sign corrections.
    Par,
    /// Amplitude-amplified PAR acting on a fresh register.
    Paroaa,
    /// A composed expression run with `--expr` and `--inputs`.
    Expr,
}

/// One bin of the rotation-count histogram.
#[derive(Serialize)]
struct HistogramBin {
    rotations: u64,
    count: u64,
}

#[derive(Serialize)]
struct SimulateReport {
    schema_version: u32,
    command: &'static str,
    target: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    expr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inputs: Option<Vec<f64>>,
    seed: u64,
    trials: u64,
    max_attempts: u64,
    success_rate: f64,
    analytic_success: Option<f64>,
    exhaustion_rate: f64,
    attempts_mean: Option<f64>,
    rotations_mean: Option<f64>,
    rotations_variance: Option<f64>,
    analytic_rotations_mean: Option<f64>,
    analytic_rotations_variance: Option<f64>,
    corrections_mean: Option<f64>,
    outcome_angle: Option<f64>,
    analytic_angle: Option<f64>,
    histogram: Vec<HistogramBin>,
}

/// Validated simulate arguments.
pub struct SimulateSpec {
    pub target: Target,
    pub angles: Vec<f64>,
    pub expr_src: Option<String>,
    pub inputs: Vec<f64>,
}

/// Mean and unbiased sample variance; variance needs two samples.
fn sample_stats(values: impl Iterator<Item = u64> + Clone) -> (Option<f64>, Option<f64>) {
    let n = values.clone().count();
    if n == 0 {
        return (None, None);
    }
    let mean = values.clone().map(|v| v as f64).sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let ss = values.map(|v| (v as f64 - mean).powi(2)).sum::<f64>();
    (Some(mean), Some(ss / (n - 1) as f64))
}

/// Flag combination checked against the chosen target.
struct Validated {
    target_name: &'static str,
    expr: Option<RusExpr>,
    angles: Vec<f64>,
    inputs: Vec<f64>,
}

/// Runs the `simulate` subcommand and renders the report.
pub fn run(spec: &SimulateSpec, job: &JobConfig) -> Result<String> {
    let Validated { target_name, expr, angles, inputs } = validate(spec)?;

    // Analytic references, where a closed form exists.
    let k = angles.len();
    let (analytic_success, analytic_angle, analytic_rot) = match spec.target {
        Target::Gb => {
            let p = gb_success_prob(&angles);
            let rot = rus_repeat_cost(&vec![CostDist::exact(1.0); 2 * k], p).ok();
            (Some(p), Some(gb_angle(&angles)), rot)
        }
        Target::Par => {
            let p = par_success_prob(&angles);
            let angle = par_angle(&angles).map_err(Failure::from)?;
            let rot = rus_repeat_cost(&vec![CostDist::exact(1.0); k], p).ok();
            (Some(p), Some(angle), rot)
        }
        Target::Paroaa => {
            // Only the single-input circuit is exactly de-randomized.
            let success = if k == 1 { Some(1.0) } else { None };
            let angle = if k == 1 { Some(angles[0]) } else { None };
            (success, angle, None)
        }
        Target::Expr => {
            let e = expr.as_ref().expect("validated");
            let angle = e.eval_angle(&inputs).map_err(Failure::from)?;
            let rot = expr_rotation_cost(e, &inputs).map_err(Failure::from)?;
            (None, Some(angle), Some(rot))
        }
    };

    // Monte Carlo pass: one independent stream per trial.
    let mut traces: Vec<RunTrace> = Vec::new();
    let mut exhausted: u64 = 0;
    let mut first_attempt_successes: u64 = 0;
    for trial in 0..job.trials {
        let mut rng = RngStream::new(job.seed, trial).rng();
        let run = match spec.target {
            Target::Gb => {
                let state = new_state(k + 1).map_err(Failure::from)?;
                run_gb(&angles, &state, k, &mut rng, job.max_attempts)
            }
            Target::Par => run_par_on_zero(&angles, &mut rng, job.max_attempts),
            Target::Paroaa => {
                let state = new_state(k + 2).map_err(Failure::from)?;
                run_par_oaa(&angles, &state, k + 1, &mut rng, job.max_attempts)
            }
            Target::Expr => {
                run_expr(expr.as_ref().expect("validated"), &inputs, &mut rng, job.max_attempts)
            }
        };
        match run {
            Ok((_, trace)) => {
                if trace.attempts == 1 {
                    first_attempt_successes += 1;
                }
                traces.push(trace);
            }
            Err(CoreError::AttemptsExhausted { .. }) => exhausted += 1,
            Err(e) => return Err(Failure::from(e)),
        }
    }

    let (attempts_mean, _) = sample_stats(traces.iter().map(|t| t.attempts));
    let (rotations_mean, rotations_variance) =
        sample_stats(traces.iter().map(|t| t.leaf_rotations));
    let (corrections_mean, _) = sample_stats(traces.iter().map(|t| t.corrections));

    let mut histogram = std::collections::BTreeMap::new();
    for t in &traces {
        *histogram.entry(t.leaf_rotations).or_insert(0u64) += 1;
    }

    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        target: target_name,
        expr: expr.as_ref().map(|e| e.to_string()),
        angles: if angles.is_empty() { None } else { Some(angles.clone()) },
        inputs: if inputs.is_empty() { None } else { Some(inputs.clone()) },
        seed: job.seed,
        trials: job.trials,
        max_attempts: job.max_attempts,
        success_rate: first_attempt_successes as f64 / job.trials as f64,
        analytic_success,
        exhaustion_rate: exhausted as f64 / job.trials as f64,
        attempts_mean,
        rotations_mean,
        rotations_variance,
        analytic_rotations_mean: analytic_rot.as_ref().map(|c| c.mean),
        analytic_rotations_variance: analytic_rot.as_ref().map(|c| c.variance),
        corrections_mean,
        outcome_angle: traces.first().map(|t| t.outcome_angle),
        analytic_angle,
        histogram: histogram
            .into_iter()
            .map(|(rotations, count)| HistogramBin { rotations, count })
            .collect(),
    };

    match job.format {
        Format::Json => job::to_json(&report),
        Format::Csv => {
            let mut text = String::from("rotations,count\n");
            for bin in &report.histogram {
                text.push_str(&format!("{},{}\n", bin.rotations, bin.count));
            }
            Ok(text)
        }
    }
}

/// Checks the flag combination for the chosen target and parses the
/// expression when one is required.
fn validate(spec: &SimulateSpec) -> Result<Validated> {
    match spec.target {
        Target::Gb | Target::Par | Target::Paroaa => {
            if spec.angles.is_empty() {
                return Err(Failure::Usage(
                    "this target needs at least one angle via --angles".to_string(),
                ));
            }
            if spec.expr_src.is_some() || !spec.inputs.is_empty() {
                return Err(Failure::Usage(
                    "--expr/--inputs only apply to the expr target".to_string(),
                ));
            }
            let target_name = match spec.target {
                Target::Gb => "gb",
                Target::Par => "par",
                Target::Paroaa => "paroaa",
                Target::Expr => unreachable!(),
            };
            Ok(Validated {
                target_name,
                expr: None,
                angles: spec.angles.clone(),
                inputs: Vec::new(),
            })
        }
        Target::Expr => {
            if !spec.angles.is_empty() {
                return Err(Failure::Usage(
                    "the expr target takes --expr and --inputs, not --angles".to_string(),
                ));
            }
            let src = spec.expr_src.as_ref().ok_or_else(|| {
                Failure::Usage("the expr target needs --expr".to_string())
            })?;
            let expr = parse_expr(src).map_err(|e| Failure::Usage(e.to_string()))?;
            if expr.arity() != spec.inputs.len() {
                return Err(Failure::Usage(format!(
                    "expression reads {} input(s) but --inputs supplied {}",
                    expr.arity(),
                    spec.inputs.len()
                )));
            }
            Ok(Validated {
                target_name: "expr",
                expr: Some(expr),
                angles: Vec::new(),
                inputs: spec.inputs.clone(),
            })
        }
    }
}
