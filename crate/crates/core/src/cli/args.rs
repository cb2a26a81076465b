//! Command-line grammar and the validated [`RunConfig`] it produces.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::clt_lab::{IncrementModel, ModelKind};
use crate::lattice_mc::{McConfig, TreeConfig};
use crate::pricing::OptionSpec;
use crate::Error;

use super::CliError;

pub const SUBCOMMANDS: [&str; 6] = [
    "price",
    "mc",
    "tree",
    "clt-demo",
    "lindeberg",
    "var-linearity",
];

/// Global flags that consume the following token.
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--format", "--output", "--config", "--threads"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Text,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        }
    }
}

/// Comma-separated list parsed as one flag value, so a later occurrence
/// replaces an earlier one instead of appending to it.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<T>().map_err(|e| format!("'{item}': {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bslab",
    version,
    about = "Black-Scholes pricing and central-limit experiments",
    args_override_self = true,
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Flat key=value file with default flag values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (1 runs sequentially). Does not change results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct OptionArgs {
    #[arg(long, allow_negative_numbers = true)]
    spot: f64,
    #[arg(long, allow_negative_numbers = true)]
    strike: f64,
    #[arg(long, allow_negative_numbers = true)]
    rate: f64,
    #[arg(long, allow_negative_numbers = true)]
    expiry: f64,
    #[arg(long, allow_negative_numbers = true)]
    vol: f64,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// two_point | uniform | centered_exponential | normal | poisson_jump
    #[arg(long, default_value = "two_point")]
    model: String,
    /// Variance of Y_1 - Y_0.
    #[arg(long, allow_negative_numbers = true)]
    variance: Option<f64>,
    /// Jump size for poisson_jump.
    #[arg(long, allow_negative_numbers = true)]
    jump: Option<f64>,
    /// Jump intensity for poisson_jump.
    #[arg(long, allow_negative_numbers = true)]
    intensity: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct LadderArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    horizon: f64,
    #[arg(long, default_value = "16,256,4096")]
    ladder: List<usize>,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    epsilon: f64,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Closed-form Black-Scholes call price.
    Price(OptionArgs),
    /// Monte Carlo call price and forward check.
    Mc {
        #[command(flatten)]
        option: OptionArgs,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        batch_size: Option<usize>,
    },
    /// Cox-Ross-Rubinstein binomial tree price.
    Tree {
        #[command(flatten)]
        option: OptionArgs,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Convergence of row sums to the normal limit over an n ladder.
    CltDemo {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ladder: LadderArgs,
    },
    /// Lindeberg sums over an n ladder.
    Lindeberg {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ladder: LadderArgs,
    },
    /// Fit of Var[Y_t] against t.
    VarLinearity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0.25,0.5,1,2")]
        horizons: List<f64>,
        /// Cells per simulated path.
        #[arg(long, default_value_t = 64)]
        rows: usize,
    },
}

/// Parameters shared by the ladder experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: IncrementModel,
    pub horizon: f64,
    pub ladder: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceConfig {
    pub model: IncrementModel,
    pub horizons: Vec<f64>,
    pub rows: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Price(OptionSpec),
    Mc(OptionSpec, McConfig),
    Tree(OptionSpec, TreeConfig),
    CltDemo(ExperimentConfig),
    Lindeberg(ExperimentConfig),
    VarLinearity(VarianceConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Price(_) => "price",
            Command::Mc(..) => "mc",
            Command::Tree(..) => "tree",
            Command::CltDemo(_) => "clt-demo",
            Command::Lindeberg(_) => "lindeberg",
            Command::VarLinearity(_) => "var-linearity",
        }
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn option_spec(a: &OptionArgs) -> Result<OptionSpec, CliError> {
    OptionSpec::new(a.spot, a.strike, a.rate, a.expiry, a.vol).map_err(usage)
}

fn increment_model(a: &ModelArgs) -> Result<IncrementModel, CliError> {
    let kind: ModelKind = a.model.parse().map_err(usage)?;
    let model = match kind {
        ModelKind::PoissonJump => {
            let jump = a.jump.unwrap_or(1.0);
            match (a.intensity, a.variance) {
                (Some(intensity), _) => IncrementModel::poisson_jump(jump, intensity),
                (None, Some(v)) => IncrementModel::from_kind(kind, v, jump),
                (None, None) => IncrementModel::poisson_jump(jump, 2.0),
            }
        }
        _ => IncrementModel::from_kind(kind, a.variance.unwrap_or(0.0225), 1.0),
    };
    model.map_err(usage)
}

fn experiment(model: &ModelArgs, ladder: &LadderArgs) -> Result<ExperimentConfig, CliError> {
    let cfg = ExperimentConfig {
        model: increment_model(model)?,
        horizon: ladder.horizon,
        ladder: ladder.ladder.0.clone(),
        samples: model.samples,
        seed: model.seed,
        epsilon: ladder.epsilon,
    };
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return Err(CliError::Usage(format!(
            "invalid horizon: {} must be positive",
            cfg.horizon
        )));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(CliError::Usage(format!(
            "invalid epsilon: {} must be positive",
            cfg.epsilon
        )));
    }
    if cfg.ladder.is_empty() || cfg.ladder[0] == 0 || cfg.ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "invalid ladder: must be strictly increasing positive integers".into(),
        ));
    }
    if cfg.samples < crate::clt_lab::MIN_KS_SAMPLES {
        return Err(CliError::Usage(format!(
            "invalid samples: {} is below the minimum of {}",
            cfg.samples,
            crate::clt_lab::MIN_KS_SAMPLES
        )));
    }
    Ok(cfg)
}

impl Sub {
    fn into_command(self) -> Result<Command, CliError> {
        Ok(match self {
            Sub::Price(o) => Command::Price(option_spec(&o)?),
            Sub::Mc {
                option,
                paths,
                seed,
                batch_size,
            } => {
                let spec = option_spec(&option)?;
                let mc = match batch_size {
                    Some(b) => McConfig::new(paths, seed, b),
                    None => McConfig::with_paths(paths, seed),
                }
                .map_err(usage)?;
                Command::Mc(spec, mc)
            }
            Sub::Tree { option, steps } => Command::Tree(
                option_spec(&option)?,
                TreeConfig::new(steps).map_err(usage)?,
            ),
            Sub::CltDemo { model, ladder } => Command::CltDemo(experiment(&model, &ladder)?),
            Sub::Lindeberg { model, ladder } => Command::Lindeberg(experiment(&model, &ladder)?),
            Sub::VarLinearity {
                model,
                horizons,
                rows,
            } => {
                let cfg = VarianceConfig {
                    model: increment_model(&model)?,
                    horizons: horizons.0,
                    rows,
                    samples: model.samples,
                    seed: model.seed,
                };
                if cfg.rows == 0 {
                    return Err(CliError::Usage("invalid rows: must be at least 1".into()));
                }
                if cfg.samples < 2 {
                    return Err(CliError::Usage(
                        "invalid samples: must be at least 2".into(),
                    ));
                }
                let mut distinct = cfg.horizons.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                if distinct.len() < 3 || distinct.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
                    return Err(CliError::Usage(
                        "invalid horizons: need at least 3 distinct positive values".into(),
                    ));
                }
                Command::VarLinearity(cfg)
            }
        })
    }
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected key=value, got '{line}'",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {}: empty key",
                lineno + 1
            )));
        }
        pairs.push((key.replace('_', "-"), value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--config" {
            found = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(p) = args[i].strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
        }
        i += 1;
    }
    found
}

fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 0;
    while i < args.len() {
        let a = args[i].as_str();
        if GLOBAL_VALUE_FLAGS.contains(&a) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return SUBCOMMANDS.contains(&a).then_some(i);
        }
    }
    None
}

/// Splices config-file flags in right after the subcommand so that flags on
/// the command line, which come later, win.
fn merge_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let mut pairs = read_config_file(&path)?;
    let command = pairs
        .iter()
        .position(|(k, _)| k == "command")
        .map(|i| pairs.remove(i).1);
    let spliced: Vec<String> = pairs
        .into_iter()
        .flat_map(|(k, v)| [format!("--{k}"), v])
        .collect();
    let mut merged = Vec::with_capacity(args.len() + spliced.len() + 1);
    match subcommand_position(&args) {
        Some(pos) => {
            merged.extend_from_slice(&args[..=pos]);
            merged.extend(spliced);
            merged.extend_from_slice(&args[pos + 1..]);
        }
        None => match command {
            Some(cmd) => {
                merged.push(cmd);
                merged.extend(spliced);
                merged.extend(args);
            }
            None => return Ok(args),
        },
    }
    Ok(merged)
}

/// Parses command-line arguments (without the program name).
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let args = merge_config(args)?;
    let cli =
        Cli::try_parse_from(std::iter::once("bslab".to_string()).chain(args)).map_err(|e| {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
                _ => CliError::Usage(e.to_string()),
            }
        })?;
    if cli.threads == Some(0) {
        return Err(CliError::Usage(
            "invalid threads: must be at least 1".into(),
        ));
    }
    Ok(RunConfig {
        command: cli.command.into_command()?,
        format: cli.format.unwrap_or_default(),
        output_path: cli.output,
        threads: cli.threads,
    })
}

fn push(args: &mut Vec<String>, flag: &str, value: impl fmt::Display) {
    args.push(format!("--{flag}"));
    args.push(value.to_string());
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn push_option(args: &mut Vec<String>, o: &OptionSpec) {
    push(args, "spot", o.spot);
    push(args, "strike", o.strike);
    push(args, "rate", o.rate);
    push(args, "expiry", o.expiry);
    push(args, "vol", o.volatility);
}

fn push_model(args: &mut Vec<String>, m: &IncrementModel, samples: usize, seed: u64) {
    push(args, "model", m.kind());
    match *m {
        IncrementModel::PoissonJump { jump, intensity } => {
            push(args, "jump", jump);
            push(args, "intensity", intensity);
        }
        _ => push(args, "variance", m.per_unit_variance()),
    }
    push(args, "samples", samples);
    push(args, "seed", seed);
}

impl RunConfig {
    /// Arguments that parse back into this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.name().to_string()];
        match &self.command {
            Command::Price(o) => push_option(&mut args, o),
            Command::Mc(o, mc) => {
                push_option(&mut args, o);
                push(&mut args, "paths", mc.paths);
                push(&mut args, "seed", mc.seed);
                push(&mut args, "batch-size", mc.batch_size);
            }
            Command::Tree(o, t) => {
                push_option(&mut args, o);
                push(&mut args, "steps", t.steps);
            }
            Command::CltDemo(e) | Command::Lindeberg(e) => {
                push_model(&mut args, &e.model, e.samples, e.seed);
                push(&mut args, "horizon", e.horizon);
                push(&mut args, "ladder", join(&e.ladder));
                push(&mut args, "epsilon", e.epsilon);
            }
            Command::VarLinearity(v) => {
                push_model(&mut args, &v.model, v.samples, v.seed);
                push(&mut args, "horizons", join(&v.horizons));
                push(&mut args, "rows", v.rows);
            }
        }
        push(&mut args, "format", self.format.as_str());
        if let Some(p) = &self.output_path {
            push(&mut args, "output", p.display());
        }
        if let Some(t) = self.threads {
            push(&mut args, "threads", t);
        }
        args
    }
}
