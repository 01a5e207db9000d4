//! Analytic cost reports: expected T-counts of gearbox/PAR circuits and
//! composed expressions, classical baseline formulas, and the
//! phase-estimation caching trade-off.
//!
//! Rotation pricing is chosen with `--model`: `constant:C` charges a flat
//! `C` per rotation (use 1 to count rotations), `synthesis:EPS` charges
//! `1.15 log2(1/EPS)`. `cost expr` without `--inputs` prices the whole
//! tree under the model; with `--inputs` it reports the input-dependent
//! expected rotation and Toffoli-T counts instead.

use serde::Serialize;

use rus_core::costs::{
    baseline_cost, cache_cost, expr_cost, expr_rotation_cost, expr_toffoli_tcount, gb_tcount,
    par_tcount, BaselineMethod, RotationCostModel,
};

use crate::expr::parse_expr;
use crate::job::{self, Failure, Format, JobConfig, Result, SCHEMA_VERSION};

/// Cost report kinds.
#[derive(Debug, clap::Subcommand)]
pub enum CostCmd {
    /// Expected T-cost of a composed expression.
    Expr {
        /// Expression in prefix notation (or m4/m6/m8/r2).
        #[arg(long)]
        expr: String,
        /// Evaluate at these inputs, reporting rotation and Toffoli counts.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        inputs: Option<Vec<f64>>,
        /// Rotation pricing: constant:C or synthesis:EPS.
        #[arg(long)]
        model: Option<String>,
    },
    /// Expected T-cost of one gearbox circuit at fixed angles.
    Gb {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<f64>,
        /// Rotation pricing: constant:C or synthesis:EPS.
        #[arg(long)]
        model: Option<String>,
    },
    /// Expected T-cost of one PAR circuit at fixed angles.
    Par {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<f64>,
        /// Rotation pricing: constant:C or synthesis:EPS.
        #[arg(long)]
        model: Option<String>,
    },
    /// Closed-form resources of a classical baseline circuit.
    Baseline {
        /// Baseline family.
        #[arg(long, value_enum)]
        method: BaselineId,
        /// Bit width (at least 2).
        #[arg(long)]
        n: u32,
    },
    /// Register size and rotation count for caching a rotation angle.
    Cache {
        /// Scale of the cached quantity.
        #[arg(long)]
        kappa: f64,
        /// Relative accuracy target, in (0, 1).
        #[arg(long)]
        eps: f64,
        /// Failure probability bound, in (0, 1).
        #[arg(long)]
        delta: f64,
        /// Rotations applied directly.
        #[arg(long, default_value_t = 0.0)]
        n1: f64,
        /// Rotations replayed from the cache.
        #[arg(long, default_value_t = 1.0)]
        n2: f64,
    },
}

/// Baseline families exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BaselineId {
    CarryRipple,
    TableLookupMult,
    Euclid,
    Newton,
    TableLookupRecip,
}

impl BaselineId {
    fn method(self) -> BaselineMethod {
        match self {
            BaselineId::CarryRipple => BaselineMethod::CarryRipple,
            BaselineId::TableLookupMult => BaselineMethod::TableLookupMultiplier,
            BaselineId::Euclid => BaselineMethod::Euclid,
            BaselineId::Newton => BaselineMethod::Newton,
            BaselineId::TableLookupRecip => BaselineMethod::TableLookupReciprocal,
        }
    }
}

/// Parses `constant:C` / `synthesis:EPS`; the default counts rotations.
fn parse_model(s: Option<&str>) -> Result<(RotationCostModel, String)> {
    let s = match s {
        None => return Ok((RotationCostModel::Constant(1.0), "constant:1".to_string())),
        Some(s) => s,
    };
    let bad = || {
        Failure::Usage(format!(
            "bad rotation model '{s}' (expected constant:C or synthesis:EPS)"
        ))
    };
    let (kind, value) = s.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    match kind.trim() {
        "constant" => Ok((RotationCostModel::Constant(value), format!("constant:{value}"))),
        "synthesis" => {
            Ok((RotationCostModel::Synthesis { eps: value }, format!("synthesis:{value}")))
        }
        _ => Err(bad()),
    }
}

/// Report for gb/par/expr costs under a rotation pricing model.
#[derive(Serialize)]
struct ModelCostReport {
    schema_version: u32,
    command: &'static str,
    kind: &'static str,
    spec: String,
    model: String,
    tcount_mean: f64,
    tcount_variance: f64,
}

/// Report for an expression evaluated at concrete inputs.
#[derive(Serialize)]
struct ExprAtInputsReport {
    schema_version: u32,
    command: &'static str,
    kind: &'static str,
    spec: String,
    inputs: Vec<f64>,
    rotations_mean: f64,
    rotations_variance: f64,
    toffoli_t_mean: f64,
    toffoli_t_variance: f64,
}

/// Report for a classical baseline.
#[derive(Serialize)]
struct BaselineCostReport {
    schema_version: u32,
    command: &'static str,
    kind: &'static str,
    method: &'static str,
    n: u32,
    tcount: f64,
    qubits: u64,
    table_mode: bool,
}

/// Report for the caching trade-off.
#[derive(Serialize)]
struct CacheCostReport {
    schema_version: u32,
    command: &'static str,
    kind: &'static str,
    kappa: f64,
    eps: f64,
    delta: f64,
    n1: f64,
    n2: f64,
    qubits: u32,
    rotations: f64,
}

fn model_report(
    kind: &'static str,
    spec: String,
    model: String,
    dist: rus_core::costs::CostDist,
    job: &JobConfig,
) -> Result<String> {
    let report = ModelCostReport {
        schema_version: SCHEMA_VERSION,
        command: "cost",
        kind,
        spec,
        model,
        tcount_mean: dist.mean,
        tcount_variance: dist.variance,
    };
    match job.format {
        Format::Json => job::to_json(&report),
        Format::Csv => Ok(format!(
            "tcount_mean,tcount_variance\n{},{}\n",
            job::sci(report.tcount_mean),
            job::sci(report.tcount_variance)
        )),
    }
}

/// Runs the `cost` subcommand and renders the report.
pub fn run(cmd: &CostCmd, job: &JobConfig) -> Result<String> {
    match cmd {
        CostCmd::Gb { angles, model } => {
            if angles.is_empty() {
                return Err(Failure::Usage("gb needs at least one angle".to_string()));
            }
            let (model, label) = parse_model(model.as_deref())?;
            let dist = gb_tcount(angles, &model).map_err(Failure::from)?;
            model_report("gb", format!("{angles:?}"), label, dist, job)
        }
        CostCmd::Par { angles, model } => {
            if angles.is_empty() {
                return Err(Failure::Usage("par needs at least one angle".to_string()));
            }
            let (model, label) = parse_model(model.as_deref())?;
            let dist = par_tcount(angles, &model).map_err(Failure::from)?;
            model_report("par", format!("{angles:?}"), label, dist, job)
        }
        CostCmd::Expr { expr, inputs, model } => {
            let tree = parse_expr(expr).map_err(|e| Failure::Usage(e.to_string()))?;
            match inputs {
                None => {
                    let (model, label) = parse_model(model.as_deref())?;
                    let dist = expr_cost(&tree, &model).map_err(Failure::from)?;
                    model_report("expr", tree.to_string(), label, dist, job)
                }
                Some(inputs) => {
                    if model.is_some() {
                        return Err(Failure::Usage(
                            "--model and --inputs are mutually exclusive: input-dependent \
                             reports count rotations and Toffoli T-gates directly"
                                .to_string(),
                        ));
                    }
                    if tree.arity() != inputs.len() {
                        return Err(Failure::Usage(format!(
                            "expression reads {} input(s) but --inputs supplied {}",
                            tree.arity(),
                            inputs.len()
                        )));
                    }
                    let rot = expr_rotation_cost(&tree, inputs).map_err(Failure::from)?;
                    let tof = expr_toffoli_tcount(&tree, inputs).map_err(Failure::from)?;
                    let report = ExprAtInputsReport {
                        schema_version: SCHEMA_VERSION,
                        command: "cost",
                        kind: "expr_at_inputs",
                        spec: tree.to_string(),
                        inputs: inputs.clone(),
                        rotations_mean: rot.mean,
                        rotations_variance: rot.variance,
                        toffoli_t_mean: tof.mean,
                        toffoli_t_variance: tof.variance,
                    };
                    match job.format {
                        Format::Json => job::to_json(&report),
                        Format::Csv => Ok(format!(
                            "rotations_mean,rotations_variance,toffoli_t_mean,toffoli_t_variance\n{},{},{},{}\n",
                            job::sci(report.rotations_mean),
                            job::sci(report.rotations_variance),
                            job::sci(report.toffoli_t_mean),
                            job::sci(report.toffoli_t_variance)
                        )),
                    }
                }
            }
        }
        CostCmd::Baseline { method, n } => {
            let rep = baseline_cost(method.method(), *n, job.table_mode).map_err(Failure::from)?;
            let report = BaselineCostReport {
                schema_version: SCHEMA_VERSION,
                command: "cost",
                kind: "baseline",
                method: method.method().label(),
                n: rep.n,
                tcount: rep.tcount,
                qubits: rep.qubits,
                table_mode: rep.table_mode,
            };
            match job.format {
                Format::Json => job::to_json(&report),
                Format::Csv => Ok(format!(
                    "method,n,tcount,qubits,mode\n{},{},{},{},{}\n",
                    report.method,
                    report.n,
                    job::sci(report.tcount),
                    report.qubits,
                    if report.table_mode { "table" } else { "formula" }
                )),
            }
        }
        CostCmd::Cache { kappa, eps, delta, n1, n2 } => {
            let (qubits, rotations) =
                cache_cost(*kappa, *eps, *delta, *n1, *n2).map_err(Failure::from)?;
            let report = CacheCostReport {
                schema_version: SCHEMA_VERSION,
                command: "cost",
                kind: "cache",
                kappa: *kappa,
                eps: *eps,
                delta: *delta,
                n1: *n1,
                n2: *n2,
                qubits,
                rotations,
            };
            match job.format {
                Format::Json => job::to_json(&report),
                Format::Csv => Ok(format!(
                    "qubits,rotations\n{},{}\n",
                    report.qubits,
                    job::sci(report.rotations)
                )),
            }
        }
    }
}
