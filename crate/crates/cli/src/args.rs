use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergo_lab_core::dynamics::DynamicalSystem;
use ergo_lab_core::exp_sums::{Frequency, DEFAULT_GRID_DEN};
use ergo_lab_core::{IntPolynomial, WeightKind};
use serde::Serialize;

use crate::CliError;

pub const THREADS_ENV: &str = "ERGO_LAB_THREADS";

const SUBCOMMANDS: [&str; 6] = ["sieve", "expsum", "average", "spectral-check", "maximal", "report"];

#[derive(Parser, Debug)]
#[command(name = "ergo-lab", version, about = "Weighted polynomial ergodic averages on finite cyclic groups")]
struct Cli {
    /// Plain-text `key=value` file; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker count (the ERGO_LAB_THREADS variable overrides it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// A validated invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    pub fn out(&self) -> Option<&PathBuf> {
        match &self.command {
            Command::Sieve(a) => a.out.as_ref(),
            Command::Expsum(a) => a.out.as_ref(),
            Command::Average(a) => a.out.as_ref(),
            Command::SpectralCheck(a) => a.out.as_ref(),
            Command::Maximal(a) => a.out.as_ref(),
            Command::Report(a) => a.out.as_ref(),
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Tabulate the Möbius or Liouville function.
    Sieve(SieveArgs),
    /// Weighted polynomial exponential sums: grid scan, decay profile or short interval.
    Expsum(ExpsumArgs),
    /// Convergence traces of bilinear averages along a lacunary ladder.
    Average(AverageArgs),
    /// Compare the spectral and direct routes to the averages.
    SpectralCheck(SpectralArgs),
    /// Band, global, weak-type and oscillation statistics on the shift.
    Maximal(MaximalArgs),
    /// Collect earlier outputs into one JSON summary.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sieve(_) => "sieve",
            Command::Expsum(_) => "expsum",
            Command::Average(_) => "average",
            Command::SpectralCheck(_) => "spectral-check",
            Command::Maximal(_) => "maximal",
            Command::Report(_) => "report",
        }
    }
}

fn parse_rho(s: &str) -> Result<f64, String> {
    let rho: f64 = s.trim().parse().map_err(|_| format!("invalid rho '{s}'"))?;
    if !(rho > 1.0) || !rho.is_finite() {
        return Err("rho must exceed 1".into());
    }
    Ok(rho)
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SieveArgs {
    #[arg(long)]
    pub weight: WeightKind,
    #[arg(long)]
    pub limit: u64,
    /// Append the running partial sums as a third column.
    #[arg(long)]
    pub sums: bool,
    /// Also verify λ(n) = Σ_{d²|n} μ(n/d²) up to the limit.
    #[arg(long)]
    pub check_identity: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpsumMode {
    Scan,
    Profile,
    Short,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ExpsumArgs {
    #[arg(value_enum, default_value = "scan")]
    pub mode: ExpsumMode,
    #[arg(long, default_value = "mobius")]
    pub weight: WeightKind,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub poly: IntPolynomial,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_GRID_DEN)]
    pub grid_den: u64,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u64>>,
    #[arg(long)]
    pub start: Option<u64>,
    #[arg(long)]
    pub span: Option<u64>,
    /// `a/q` for θ = 2πa/q, or a bare number of radians.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Frequency>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct AverageArgs {
    /// `cyclic:J` or `rotation:p/q`.
    #[arg(long)]
    pub system: DynamicalSystem,
    /// Observable spec: one, const:c, mode:m, trig:m:re:im[,...], delta:a, signs, uniform.
    #[arg(long, default_value = "signs", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value = "signs", allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub poly_p: IntPolynomial,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub poly_q: IntPolynomial,
    #[arg(long, default_value = "mobius")]
    pub weight: WeightKind,
    #[arg(long, default_value = "2", value_parser = parse_rho)]
    pub rho: f64,
    #[arg(long)]
    pub limit: u64,
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SpectralArgs {
    #[arg(long)]
    pub j: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub poly_p: IntPolynomial,
    #[arg(long, default_value = "0,-1", allow_hyphen_values = true)]
    pub poly_q: IntPolynomial,
    #[arg(long, default_value = "mobius")]
    pub weight: WeightKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u32,
    /// Corrupt one coefficient of D to exercise the mismatch path.
    #[arg(long)]
    pub inject_fault: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximalMode {
    Band,
    Global,
    Weaktype,
    Oscillation,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Signs,
    Uniform,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct MaximalArgs {
    #[arg(long, value_enum)]
    pub mode: MaximalMode,
    #[arg(long)]
    pub j: usize,
    #[arg(long, default_value = "2", value_parser = parse_rho)]
    pub rho: f64,
    /// Number of bands K; endpoints are the ladder members at indices 1..=K+1.
    #[arg(long, default_value_t = 4)]
    pub bands: usize,
    /// Zero-based band shown in `band` mode.
    #[arg(long, default_value_t = 0)]
    pub band: usize,
    /// Truncation for `global` and `weaktype`; defaults to the last endpoint.
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, default_value = "2")]
    pub p_exp: f64,
    #[arg(long, default_value = "2")]
    pub q_exp: f64,
    #[arg(long, default_value = "mobius")]
    pub weight: WeightKind,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub poly_p: IntPolynomial,
    #[arg(long, default_value = "0,-1", allow_hyphen_values = true)]
    pub poly_q: IntPolynomial,
    #[arg(long, value_enum, default_value = "signs")]
    pub signals: SignalKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Turns `key=value` lines into flags.
fn config_tokens(path: &PathBuf) -> Result<(Option<String>, Vec<OsString>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut command = None;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key.is_empty() {
            return Err(CliError::Usage(format!("{}:{}: empty key", path.display(), lineno + 1)));
        }
        if key == "command" {
            command = Some(value.to_string());
            continue;
        }
        match value {
            "true" => tokens.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}").into());
                tokens.push(value.into());
            }
        }
    }
    Ok((command, tokens))
}

/// Parses an argument vector (program name first) into a validated config.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let mut config_path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::Usage("--config needs a file".into()));
            }
            config_path = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(PathBuf::from(p));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    if let Some(path) = config_path {
        let (command, tokens) = config_tokens(&path)?;
        let pos = args
            .iter()
            .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
            .map(|p| p + 1);
        let pos = match (pos, command) {
            (Some(p), _) => p,
            (None, Some(c)) => {
                args.insert(1, c.into());
                2
            }
            (None, None) => args.len(),
        };
        args.splice(pos..pos, tokens);
    }
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let config = RunConfig { threads: cli.threads, command: cli.command };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    if config.threads == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    if let Command::Expsum(a) = &config.command {
        let conflict = |flag: &str| CliError::Usage(format!("--{flag} conflicts with expsum mode {:?}", a.mode));
        match a.mode {
            ExpsumMode::Scan => {
                if a.n_max.is_none() {
                    return Err(CliError::Usage("expsum scan needs --n-max".into()));
                }
                if a.n_list.is_some() {
                    return Err(conflict("n-list"));
                }
                if a.theta.is_some() || a.start.is_some() || a.span.is_some() {
                    return Err(conflict("theta/start/span"));
                }
            }
            ExpsumMode::Profile => {
                if a.n_list.is_none() {
                    return Err(CliError::Usage("expsum profile needs --n-list".into()));
                }
                if a.n_max.is_some() {
                    return Err(conflict("n-max"));
                }
                if a.theta.is_some() || a.start.is_some() || a.span.is_some() {
                    return Err(conflict("theta/start/span"));
                }
            }
            ExpsumMode::Short => {
                if a.start.is_none() || a.span.is_none() || a.theta.is_none() {
                    return Err(CliError::Usage("expsum short needs --start, --span and --theta".into()));
                }
                if a.n_max.is_some() || a.n_list.is_some() {
                    return Err(conflict("n-max/n-list"));
                }
            }
        }
    }
    if let Command::Maximal(a) = &config.command {
        if a.bands == 0 {
            return Err(CliError::Usage("--bands must be positive".into()));
        }
        if a.j == 0 {
            return Err(CliError::Usage("--j must be positive".into()));
        }
    }
    Ok(())
}

/// Worker count: the environment variable wins over the flag.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        _ => Ok(flag),
    }
}
