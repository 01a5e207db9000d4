//! Shared job plumbing: resolved run configuration, failure
//! classification, and deterministic report rendering.
//!
//! Every subcommand resolves its parameters in the same three layers:
//! built-in defaults, then a line-oriented `key=value` config file, then
//! explicit command-line flags. A resolved [`JobConfig`] plus the
//! subcommand arguments fully determine the output bytes; reports carry no
//! timestamps, hostnames, or other ambient state.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use rus_core::error::Error as CoreError;

/// Version stamped into every JSON report so downstream consumers can
/// detect layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Default RNG seed. Documented so that published numbers can be
/// regenerated byte-for-byte.
pub const DEFAULT_SEED: u64 = 42;

/// Default Monte Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 10_000;

/// Default attempt budget for each repeat-until-success activation.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000;

/// A command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config entries, or spec syntax; exit code 1.
    Usage(String),
    /// Numerical failure at run time (singular solve, exhausted retry
    /// budget, domain violation) or an I/O failure; exit code 2.
    Runtime(String),
}

impl Failure {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for Failure {
    /// Maps library errors onto exit classes: size and arity violations
    /// are caller mistakes, everything else is a numerical failure.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ArityMismatch { .. }
            | CoreError::QubitOutOfRange { .. }
            | CoreError::RegisterTooLarge { .. }
            | CoreError::SystemTooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("i/o error: {e}"))
    }
}

/// Result alias used throughout the front end.
pub type Result<T> = std::result::Result<T, Failure>;

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Pretty-printed JSON with a `schema_version` field.
    Json,
    /// Comma-separated rows; floats in scientific notation with six
    /// significant digits, '.' decimal separator, no thousands separators.
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the documented defaults.
#[derive(Debug, clap::Args)]
pub struct GlobalArgs {
    /// RNG seed for Monte Carlo jobs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trial count (at least 1).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Line-oriented key=value config file; explicit flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Use the published-table variant of the baseline cost formulas where
    /// prose and tables disagree.
    #[arg(long, global = true)]
    pub table_mode: bool,

    /// Attempt budget per repeat-until-success activation (at least 1).
    #[arg(long, global = true)]
    pub max_attempts: Option<u64>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub seed: u64,
    pub trials: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub table_mode: bool,
    pub max_attempts: u64,
}

/// Values read from a config file; `None` means the key was absent.
#[derive(Debug, Default)]
struct FileConfig {
    seed: Option<u64>,
    trials: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    table_mode: Option<bool>,
    max_attempts: Option<u64>,
}

/// Parses a line-oriented `key=value` config file. Blank lines and lines
/// starting with '#' are ignored; unknown keys and malformed values are
/// usage errors naming the offending line.
fn parse_config(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!("config line {lineno}: expected key=value, got '{line}'"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            Failure::Usage(format!("config line {lineno}: invalid {what} '{value}'"))
        };
        match key {
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "trials" => cfg.trials = Some(value.parse().map_err(|_| bad("trials"))?),
            "format" => {
                cfg.format = Some(match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(bad("format (expected json or csv)")),
                })
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            "table_mode" => cfg.table_mode = Some(value.parse().map_err(|_| bad("table_mode"))?),
            "max_attempts" => {
                cfg.max_attempts = Some(value.parse().map_err(|_| bad("max_attempts"))?)
            }
            _ => {
                return Err(Failure::Usage(format!(
                    "config line {lineno}: unknown key '{key}'"
                )))
            }
        }
    }
    Ok(cfg)
}

/// Resolves the effective job configuration from defaults, the optional
/// config file, and explicit flags (highest precedence).
pub fn resolve(args: &GlobalArgs) -> Result<JobConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => FileConfig::default(),
    };
    let trials = args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".to_string()));
    }
    let max_attempts = args.max_attempts.or(file.max_attempts).unwrap_or(DEFAULT_MAX_ATTEMPTS);
    if max_attempts == 0 {
        return Err(Failure::Usage("max_attempts must be at least 1".to_string()));
    }
    Ok(JobConfig {
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        trials,
        format: args.format.or(file.format).unwrap_or(Format::Json),
        out: args.out.clone().or(file.out),
        table_mode: args.table_mode || file.table_mode.unwrap_or(false),
        max_attempts,
    })
}

/// Scientific notation with six significant digits; the CSV cell format
/// for floats.
pub fn sci(x: f64) -> String {
    format!("{:.5e}", x)
}

/// [`sci`] for optional cells; absent values render as the empty string.
pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Empty-string rendering for any optional displayable cell.
pub fn cell_opt<T: fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(report: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Runtime(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Writes the rendered report to the configured output path, or stdout.
pub fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = parse_config("# comment\n\nseed=7\ntrials = 55\nformat=csv\ntable_mode=true\n")
            .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.trials, Some(55));
        assert_eq!(cfg.format, Some(Format::Csv));
        assert_eq!(cfg.table_mode, Some(true));
        assert_eq!(cfg.max_attempts, None);
    }

    #[test]
    fn config_rejects_unknown_keys_with_line_numbers() {
        let err = parse_config("seed=1\nwibble=2\n").unwrap_err();
        match err {
            Failure::Usage(msg) => assert!(msg.contains("line 2") && msg.contains("wibble")),
            Failure::Runtime(_) => panic!("expected a usage error"),
        }
    }

    #[test]
    fn sci_uses_six_significant_digits() {
        assert_eq!(sci(234.0), "2.34000e2");
        assert_eq!(sci(6.666711e-9), "6.66671e-9");
        assert_eq!(sci(0.5), "5.00000e-1");
    }
}
