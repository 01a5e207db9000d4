//! Square-wave synthesis: fit a target function with smoothed square
//! waves and report the coefficients and the pointwise error profile.
//!
//! Function specs:
//!
//! * `reciprocal` - the rescaled reciprocal `1 / (1 - y)`;
//! * `poly:c0,c1,...` - polynomial with coefficients from low to high
//!   degree;
//! * `mesh:PATH` - piecewise-linear interpolation of `x,y` lines from a
//!   file (values clamp to the end segments outside the mesh);
//! * `basis:J` - the J-th (1-based) smoothed basis wave itself, which must
//!   fit with a unit coefficient vector.
//!
//! The JSON report carries the coefficients and summary errors; the CSV
//! report is the per-point error profile over `--eval-interval` (default:
//! the fit interval). Relative error is left blank where the target is
//! smaller than 1e-12 in magnitude.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;

use serde::Serialize;

use rus_core::synth::{gb_iterate, square_wave_eval, square_wave_fit};

use crate::job::{self, Failure, Format, JobConfig, Result, SCHEMA_VERSION};

/// Default fit interval, matching the published reciprocal experiment.
pub const DEFAULT_INTERVAL: (f64, f64) = (-0.1, 0.6);
/// Default number of basis waves.
pub const DEFAULT_WAVES: usize = 71;
/// Default gearbox recursion order of the basis waves.
pub const DEFAULT_ORDER: u32 = 8;
/// Default number of error-profile grid points.
pub const DEFAULT_POINTS: usize = 1001;

/// Validated sqwave arguments.
pub struct SqwaveSpec {
    pub fspec: String,
    pub interval: (f64, f64),
    pub waves: usize,
    pub order: u32,
    pub points: usize,
    pub padding: Option<f64>,
    pub eval_interval: Option<(f64, f64)>,
}

/// A parsed function spec, ready to evaluate.
enum Target {
    Reciprocal,
    Poly(Vec<f64>),
    Mesh(Vec<(f64, f64)>),
    Basis(usize),
}

impl Target {
    /// Evaluates the target; `layout` supplies the wave geometry for
    /// `basis` specs.
    fn eval(&self, x: f64, layout: &WaveLayout) -> f64 {
        match self {
            Target::Reciprocal => 1.0 / (1.0 - x),
            Target::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            Target::Mesh(points) => {
                let first = points.first().expect("validated nonempty");
                let last = points.last().expect("validated nonempty");
                if x <= first.0 {
                    return first.1;
                }
                if x >= last.0 {
                    return last.1;
                }
                let hi = points.partition_point(|p| p.0 < x);
                let (x0, y0) = points[hi - 1];
                let (x1, y1) = points[hi];
                if x1 == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
            Target::Basis(j) => layout.wave(*j, x),
        }
    }
}

/// Geometry of the basis waves implied by the fit parameters; mirrors the
/// layout the fitter itself uses.
struct WaveLayout {
    anchor: f64,
    length: f64,
    waves: usize,
    order: u32,
}

impl WaveLayout {
    fn new(spec: &SqwaveSpec) -> Self {
        let (lo, hi) = spec.interval;
        let padding = spec.padding.unwrap_or(0.1 * (hi - lo));
        let anchor = lo - padding;
        WaveLayout {
            anchor,
            length: (hi + padding) - anchor,
            waves: spec.waves,
            order: spec.order,
        }
    }

    /// The `j`-th (1-based) smoothed square wave. The composed-gearbox
    /// limit at a tangent pole is `pi/2` from both sides.
    fn wave(&self, j: usize, x: f64) -> f64 {
        let period = 2.0 * self.length * j as f64 / self.waves as f64;
        let u = (x - self.anchor) * PI / period + FRAC_PI_4;
        (4.0 / PI) * (gb_iterate(u, self.order).unwrap_or(FRAC_PI_2) - FRAC_PI_4)
    }
}

/// One row of the error profile.
#[derive(Serialize)]
struct ProfilePoint {
    x: f64,
    target: f64,
    fit: f64,
    abs_error: f64,
    rel_error: Option<f64>,
}

#[derive(Serialize)]
struct SqwaveReport {
    schema_version: u32,
    command: &'static str,
    fspec: String,
    interval: (f64, f64),
    waves: usize,
    order: u32,
    padding: f64,
    anchor: f64,
    eval_interval: (f64, f64),
    points: usize,
    max_abs_error: f64,
    max_rel_error: Option<f64>,
    mean_rel_error: Option<f64>,
    coefficients: Vec<f64>,
    periods: Vec<f64>,
}

/// Parses a function spec string; file contents are read here so that
/// malformed meshes surface as usage errors.
fn parse_fspec(s: &str, waves: usize) -> Result<Target> {
    if s == "reciprocal" {
        return Ok(Target::Reciprocal);
    }
    if let Some(rest) = s.strip_prefix("poly:") {
        let coeffs: Vec<f64> = rest
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("poly: bad coefficient '{c}'")))
            })
            .collect::<Result<_>>()?;
        if coeffs.is_empty() {
            return Err(Failure::Usage("poly: needs at least one coefficient".to_string()));
        }
        return Ok(Target::Poly(coeffs));
    }
    if let Some(path) = s.strip_prefix("mesh:") {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read mesh {path}: {e}")))?;
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(|c: char| c == ',' || c.is_whitespace());
            let bad =
                || Failure::Usage(format!("mesh line {}: expected 'x,y', got '{line}'", idx + 1));
            let x: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let y: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            points.push((x, y));
        }
        if points.len() < 2 {
            return Err(Failure::Usage("mesh: needs at least two points".to_string()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        return Ok(Target::Mesh(points));
    }
    if let Some(rest) = s.strip_prefix("basis:") {
        let j: usize = rest
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("basis: bad wave index '{rest}'")))?;
        if j == 0 || j > waves {
            return Err(Failure::Usage(format!(
                "basis: wave index must be in 1..={waves}"
            )));
        }
        return Ok(Target::Basis(j));
    }
    Err(Failure::Usage(format!(
        "unknown function spec '{s}' (expected reciprocal, poly:..., mesh:PATH, or basis:J)"
    )))
}

/// Runs the `sqwave` subcommand and renders the report.
pub fn run(spec: &SqwaveSpec, job: &JobConfig) -> Result<String> {
    if spec.waves == 0 {
        return Err(Failure::Usage("at least one wave is required (--waves)".to_string()));
    }
    if spec.points < 2 {
        return Err(Failure::Usage("the error profile needs at least 2 points".to_string()));
    }
    let (lo, hi) = spec.interval;
    if !(hi > lo) {
        return Err(Failure::Usage("interval must satisfy lo < hi".to_string()));
    }

    let target = parse_fspec(&spec.fspec, spec.waves)?;
    let layout = WaveLayout::new(spec);
    let fit = square_wave_fit(
        |x| target.eval(x, &layout),
        lo,
        hi,
        spec.waves,
        spec.order,
        spec.padding,
    )
    .map_err(Failure::from)?;

    let (elo, ehi) = spec.eval_interval.unwrap_or(spec.interval);
    if !(ehi > elo) {
        return Err(Failure::Usage("eval interval must satisfy lo < hi".to_string()));
    }
    let mut profile = Vec::with_capacity(spec.points);
    for i in 0..spec.points {
        let x = elo + (ehi - elo) * i as f64 / (spec.points - 1) as f64;
        let want = target.eval(x, &layout);
        let got = square_wave_eval(&fit, x);
        let abs_error = (got - want).abs();
        let rel_error = (want.abs() > 1e-12).then(|| abs_error / want.abs());
        profile.push(ProfilePoint { x, target: want, fit: got, abs_error, rel_error });
    }

    let max_abs = profile.iter().fold(0.0f64, |m, p| m.max(p.abs_error));
    let rels: Vec<f64> = profile.iter().filter_map(|p| p.rel_error).collect();
    let max_rel = rels.iter().copied().fold(None, |m: Option<f64>, r| {
        Some(m.map_or(r, |v| v.max(r)))
    });
    let mean_rel = if rels.is_empty() {
        None
    } else {
        Some(rels.iter().sum::<f64>() / rels.len() as f64)
    };

    let report = SqwaveReport {
        schema_version: SCHEMA_VERSION,
        command: "sqwave",
        fspec: spec.fspec.clone(),
        interval: spec.interval,
        waves: spec.waves,
        order: spec.order,
        padding: fit.padding,
        anchor: fit.anchor(),
        eval_interval: (elo, ehi),
        points: spec.points,
        max_abs_error: max_abs,
        max_rel_error: max_rel,
        mean_rel_error: mean_rel,
        coefficients: fit.coefficients.clone(),
        periods: fit.periods.clone(),
    };

    match job.format {
        Format::Json => job::to_json(&report),
        Format::Csv => {
            let mut text = String::from("x,target,fit,abs_error,rel_error\n");
            for p in &profile {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    job::sci(p.x),
                    job::sci(p.target),
                    job::sci(p.fit),
                    job::sci(p.abs_error),
                    job::sci_opt(p.rel_error),
                ));
            }
            Ok(text)
        }
    }
}
