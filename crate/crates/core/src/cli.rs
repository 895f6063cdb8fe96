//! Experiment configuration and the `jumptame` command.
//!
//! Settings are resolved in this order: command-line flags, then the
//! `--config` file (flat `key = value` lines, `#` comments), then
//! `JUMPTAME_SEED` for the seed, then built-in defaults.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::analysis::{
    divergence_demo, moment_track, strong_error, write_convergence_csv, write_divergence_csv, write_moments_csv,
    NoiseMode, DIVERGENCE_SCHEMES, MIN_REFERENCE_FACTOR,
};
use crate::error::Error;
use crate::problem::{catalog, JumpDiffusionProblem};
use crate::schemes::SchemeId;

pub const SEED_ENV: &str = "JUMPTAME_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_LEVELS: [usize; 6] = [16, 32, 64, 128, 256, 512];
pub const DEFAULT_REF_STEPS: usize = 8192;
pub const DEFAULT_PATHS: usize = 1000;
pub const DEFAULT_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Converge,
    Moments,
    Diverge,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "converge" => Ok(Mode::Converge),
            "moments" => Ok(Mode::Moments),
            "diverge" => Ok(Mode::Diverge),
            _ => Err(format!("unknown mode {s:?} (expected converge, moments or diverge)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Converge => "converge",
            Mode::Moments => "moments",
            Mode::Diverge => "diverge",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem_key: String,
    pub mode: Mode,
    /// Empty means every scheme applicable to the mode and problem.
    pub schemes: Vec<SchemeId>,
    /// Step counts; strictly increasing, each dividing `ref_steps`.
    pub levels: Vec<usize>,
    pub ref_steps: usize,
    pub n_paths: usize,
    /// Error norm exponent in converge mode, moment order in moments mode.
    pub p: f64,
    pub seed: u64,
    pub output_path: PathBuf,
    pub threads: Option<usize>,
    /// Diverge mode: drive every scheme with zero increments.
    pub noise_free: bool,
    pub threshold: f64,
    /// Replaces the catalog horizon when set.
    pub horizon: Option<f64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "jumptame",
    version,
    about = "Tamed Euler schemes for jump-diffusion SDEs: strong convergence, moment and divergence experiments"
)]
struct Flags {
    /// Catalog problem key (cubic, linear, linear-jump, zero).
    #[arg(long)]
    problem: Option<String>,
    /// converge | moments | diverge
    #[arg(long)]
    mode: Option<String>,
    /// EM, NCTS, STS or CTS; repeatable.
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// Comma-separated step counts, e.g. 16,32,64.
    #[arg(long)]
    levels: Option<String>,
    /// Reference step count.
    #[arg(long = "ref")]
    ref_steps: Option<String>,
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long)]
    threads: Option<String>,
    /// key=value file supplying any of the other settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Diverge mode: use the zero-increment realization.
    #[arg(long)]
    noise_free: bool,
    /// Diverge mode: escape radius.
    #[arg(long)]
    threshold: Option<String>,
    /// Overrides the problem's time horizon T.
    #[arg(long)]
    horizon: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation; exit code 2.
    Usage(String),
    /// `--help` or `--version`; print and exit 0.
    Info(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Info(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_number<N: FromStr>(key: &str, raw: &str) -> Result<N, CliError> {
    raw.trim().parse().map_err(|_| usage(format!("invalid value {raw:?} for {key}")))
}

fn parse_levels(raw: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',').map(|s| parse_number::<usize>("levels", s)).collect()
}

fn parse_schemes<'a>(raw: impl IntoIterator<Item = &'a str>) -> Result<Vec<SchemeId>, CliError> {
    let mut out = Vec::new();
    for item in raw {
        for name in item.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let scheme: SchemeId = name.parse().map_err(|e: Error| usage(e.to_string()))?;
            if !out.contains(&scheme) {
                out.push(scheme);
            }
        }
    }
    Ok(out)
}

/// Reads a flat `key = value` file; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<HashMap<String, String>, CliError> {
    const KEYS: &[&str] = &[
        "problem",
        "mode",
        "scheme",
        "levels",
        "ref",
        "paths",
        "p",
        "seed",
        "out",
        "threads",
        "noise_free",
        "threshold",
        "horizon",
    ];
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key {key:?}", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parses `args` (without the program name) using the process environment
/// for the seed fallback.
pub fn parse_config<S: AsRef<str>>(args: &[S]) -> Result<ExperimentConfig, CliError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    parse_config_with_env(args, env_seed.as_deref())
}

pub fn parse_config_with_env<S: AsRef<str>>(args: &[S], env_seed: Option<&str>) -> Result<ExperimentConfig, CliError> {
    let argv = std::iter::once("jumptame").chain(args.iter().map(AsRef::as_ref));
    let flags = Flags::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());

    let problem_key = pick(&flags.problem, "problem").ok_or_else(|| usage("missing required --problem"))?;
    if catalog::get::<f64>(&problem_key).is_none() {
        return Err(usage(format!("unknown problem {problem_key:?} (known: {})", catalog::KEYS.join(", "))));
    }
    let mode = match pick(&flags.mode, "mode") {
        Some(raw) => raw.parse::<Mode>().map_err(usage)?,
        None => Mode::Converge,
    };
    let schemes = if flags.schemes.is_empty() {
        parse_schemes(file.get("scheme").map(String::as_str))?
    } else {
        parse_schemes(flags.schemes.iter().map(String::as_str))?
    };
    let levels = match pick(&flags.levels, "levels") {
        Some(raw) => parse_levels(&raw)?,
        None => DEFAULT_LEVELS.to_vec(),
    };
    let ref_steps = match pick(&flags.ref_steps, "ref") {
        Some(raw) => parse_number("ref", &raw)?,
        None => DEFAULT_REF_STEPS,
    };
    let n_paths = match pick(&flags.paths, "paths") {
        Some(raw) => parse_number("paths", &raw)?,
        None => DEFAULT_PATHS,
    };
    let p = match pick(&flags.p, "p") {
        Some(raw) => parse_number("p", &raw)?,
        None => 2.0,
    };
    let seed = match pick(&flags.seed, "seed").or_else(|| env_seed.map(str::to_string)) {
        Some(raw) => parse_number("seed", &raw)?,
        None => 0,
    };
    let output_path = flags
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{mode}.csv")));
    let threads = match pick(&flags.threads, "threads") {
        Some(raw) => Some(parse_number::<usize>("threads", &raw)?),
        None => None,
    };
    let noise_free = flags.noise_free
        || match file.get("noise_free") {
            Some(raw) => parse_number::<bool>("noise_free", raw)?,
            None => false,
        };
    let threshold = match pick(&flags.threshold, "threshold") {
        Some(raw) => parse_number("threshold", &raw)?,
        None => DEFAULT_THRESHOLD,
    };
    let horizon = match pick(&flags.horizon, "horizon") {
        Some(raw) => Some(parse_number::<f64>("horizon", &raw)?),
        None => None,
    };

    let config = ExperimentConfig {
        problem_key,
        mode,
        schemes,
        levels,
        ref_steps,
        n_paths,
        p,
        seed,
        output_path,
        threads,
        noise_free,
        threshold,
        horizon,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &ExperimentConfig) -> Result<(), CliError> {
    if c.levels.is_empty() {
        return Err(usage("levels must not be empty"));
    }
    if c.ref_steps == 0 {
        return Err(usage("ref must be positive"));
    }
    for (i, &level) in c.levels.iter().enumerate() {
        if level == 0 {
            return Err(usage("level 0 is not a valid step count"));
        }
        if i > 0 && level <= c.levels[i - 1] {
            return Err(usage(format!("levels must be strictly increasing: {level} follows {}", c.levels[i - 1])));
        }
        if !c.ref_steps.is_multiple_of(level) {
            return Err(usage(format!("level {level} does not divide ref {}", c.ref_steps)));
        }
    }
    if c.n_paths == 0 {
        return Err(usage("paths must be at least 1"));
    }
    if !(c.p >= 1.0) || !c.p.is_finite() {
        return Err(usage(format!("p must be at least 1, got {}", c.p)));
    }
    if let Some(h) = c.horizon {
        if !(h > 0.0) || !h.is_finite() {
            return Err(usage(format!("horizon must be finite and positive, got {h}")));
        }
    }
    if c.threads == Some(0) {
        return Err(usage("threads must be at least 1"));
    }
    if c.mode == Mode::Converge {
        let finest = *c.levels.last().expect("non-empty");
        if c.ref_steps < MIN_REFERENCE_FACTOR * finest {
            return Err(usage(format!(
                "ref {} must be at least {MIN_REFERENCE_FACTOR} times the finest level {finest}",
                c.ref_steps
            )));
        }
        if c.n_paths < 2 {
            return Err(usage("converge mode needs at least 2 paths"));
        }
    }
    if let Some(problem) = catalog::get::<f64>(&c.problem_key) {
        for s in &c.schemes {
            if !s.applicable(&problem) {
                return Err(usage(format!("{s} needs a drift split, which {} does not provide", c.problem_key)));
            }
        }
    }
    Ok(())
}

fn default_schemes(mode: Mode, problem: &JumpDiffusionProblem<f64>) -> Vec<SchemeId> {
    match mode {
        Mode::Diverge => DIVERGENCE_SCHEMES.to_vec(),
        _ => SchemeId::TAMED.into_iter().filter(|s| s.applicable(problem)).collect(),
    }
}

/// Failure while executing a valid configuration.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numeric(#[from] Error),
}

/// Runs the configured experiment, writing the CSV and one summary line per
/// scheme to `summary`.
pub fn execute<W: Write>(config: &ExperimentConfig, summary: &mut W) -> Result<(), RunError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads.unwrap_or(0)).build().expect("thread pool");
    let lines = pool.install(|| execute_in_pool(config))?;
    for line in lines {
        let _ = writeln!(summary, "{line}");
    }
    Ok(())
}

fn open_output(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Output { path: path.to_path_buf(), source })
}

fn write_failed(path: &Path, e: Error) -> RunError {
    match e {
        Error::Io(source) => RunError::Output { path: path.to_path_buf(), source },
        other => RunError::Numeric(other),
    }
}

fn execute_in_pool(config: &ExperimentConfig) -> Result<Vec<String>, RunError> {
    let problem = catalog::get::<f64>(&config.problem_key)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown problem {}", config.problem_key)))?;
    let problem = match config.horizon {
        Some(h) => problem.with_horizon(h)?,
        None => problem,
    };
    let schemes =
        if config.schemes.is_empty() { default_schemes(config.mode, &problem) } else { config.schemes.clone() };
    // open before computing so an unwritable path fails fast
    let mut out = open_output(&config.output_path)?;
    let path = config.output_path.as_path();
    let mut summary = Vec::new();

    match config.mode {
        Mode::Converge => {
            let mut reports = Vec::with_capacity(schemes.len());
            for &scheme in &schemes {
                let report = strong_error(
                    &problem,
                    scheme,
                    &config.levels,
                    config.ref_steps,
                    config.n_paths,
                    config.p,
                    config.seed,
                )?;
                let order = report.fitted_order.map_or_else(|| "degenerate".to_string(), |o| format!("{o:.4}"));
                summary.push(format!(
                    "{scheme}: fitted_order={order} p={} paths={} ref={} excluded={} max_drift_increment={:.6}",
                    config.p,
                    config.n_paths,
                    config.ref_steps,
                    report.excluded(),
                    report.max_drift_increment
                ));
                reports.push(report);
            }
            write_convergence_csv(&reports, &mut out).map_err(|e| write_failed(path, e))?;
        }
        Mode::Moments => {
            let mut tracks = Vec::new();
            for &scheme in &schemes {
                let mut sups = Vec::new();
                for &steps in &config.levels {
                    let track = moment_track(&problem, scheme, steps, config.n_paths, config.p, config.seed)?;
                    sups.push(format!("{steps}:{:.6e}", track.sup_moment));
                    tracks.push(track);
                }
                summary.push(format!("{scheme}: sup_n E|Y_n|^{} by steps {}", config.p, sups.join(" ")));
            }
            write_moments_csv(&tracks, &mut out).map_err(|e| write_failed(path, e))?;
        }
        Mode::Diverge => {
            let dts: Vec<f64> = config.levels.iter().map(|&m| problem.horizon() / m as f64).collect();
            let noise = if config.noise_free { NoiseMode::Free } else { NoiseMode::Sampled };
            let rows: Vec<_> = divergence_demo(&problem, &dts, config.n_paths, config.threshold, config.seed, noise)?
                .into_iter()
                .filter(|r| schemes.contains(&r.scheme))
                .collect();
            for &scheme in &schemes {
                let fractions: Vec<String> =
                    rows.iter().filter(|r| r.scheme == scheme).map(|r| format!("dt={}:{}", r.dt, r.fraction)).collect();
                summary.push(format!("{scheme}: escape fraction {}", fractions.join(" ")));
            }
            write_divergence_csv(&rows, &mut out).map_err(|e| write_failed(path, e))?;
        }
    }
    Ok(summary)
}

/// Runs `config` and maps the outcome to the process exit code.
pub fn run(config: &ExperimentConfig) -> i32 {
    let stdout = std::io::stdout();
    match execute(config, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// Full command: parse, run, exit code.
pub fn main_with_args<S: AsRef<str>>(args: &[S]) -> i32 {
    match parse_config(args) {
        Ok(config) => run(&config),
        Err(CliError::Info(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            EXIT_USAGE
        }
    }
}
