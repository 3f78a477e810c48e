//! `cartan`: batch driver for the integral-geometry estimators.
//!
//! Every command writes one JSON document
//!
//! ```text
//! {"schema_version": 1, "command", "config", "shard_plan", "result", "metadata"}
//! ```
//!
//! where `config` is the fully resolved experiment and `metadata` holds the
//! only run-dependent fields (timestamp, thread count). Everything outside
//! `metadata` is a pure function of `config` and `shard_plan`.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use config::{BodyArg, EpsGrid, SampleCount};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configs or bodies (exit 2).
    Validation(String),
    /// A numerical method failed on valid input (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cartan_core::Error> for CliError {
    fn from(e: cartan_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cartan", version, about = "Kinematic formulas for the affine group, by Monte Carlo")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalArgs {
    /// JSON file of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Shards per estimate. Part of the reproducibility key.
    #[arg(long, global = true)]
    pub shards: Option<u32>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the tabular result as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intrinsic volumes of one body, closed form or Steiner fit.
    Intrinsic(IntrinsicArgs),
    /// The Gaussian constants c_0..c_n.
    Cj(CjArgs),
    /// Kinematic integral against the Hadwiger-type right-hand side.
    Kinematic(KinematicArgs),
    /// Boundary characterization of touching positions on polygons.
    LemmaCheck(LemmaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Intrinsic(_) => "intrinsic",
            Command::Cj(_) => "cj",
            Command::Kinematic(_) => "kinematic",
            Command::LemmaCheck(_) => "lemma-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntrinsicMethod {
    /// Closed form when the body type has one, otherwise Steiner fit.
    Auto,
    Closed,
    Steiner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CjMethod {
    Direct,
    Weyl,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupArg {
    Gl,
    O,
    So,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiArg {
    /// Euler characteristic.
    Chi,
    /// Volume.
    Vn,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntrinsicArgs {
    /// Body spec: a JSON file path or inline JSON.
    #[arg(long)]
    pub body: Option<BodyArg>,
    #[arg(long, value_enum)]
    pub method: Option<IntrinsicMethod>,
    /// Steiner epsilons: start:stop:count or a comma list.
    #[arg(long)]
    pub eps: Option<EpsGrid>,
    /// Total hit-or-miss points for the Steiner fit.
    #[arg(long)]
    pub samples: Option<SampleCount>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CjArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Report only this c_j.
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<CjMethod>,
    #[arg(long)]
    pub samples: Option<SampleCount>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory of cached constants, read and written.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicArgs {
    #[arg(long, value_enum)]
    pub group: Option<GroupArg>,
    #[arg(long, value_enum)]
    pub phi: Option<PhiArg>,
    /// The fixed body.
    #[arg(long = "M", id = "M")]
    #[serde(rename = "M")]
    pub m: Option<BodyArg>,
    /// The moving body; needs closed-form intrinsic volumes.
    #[arg(long = "L", id = "L")]
    #[serde(rename = "L")]
    pub l: Option<BodyArg>,
    /// Outer samples of the left-hand side.
    #[arg(long)]
    pub samples: Option<SampleCount>,
    /// Samples per Crofton coefficient (default: --samples).
    #[arg(long)]
    pub crofton_samples: Option<SampleCount>,
    /// Samples for c_0..c_n (default: --samples).
    #[arg(long)]
    pub c_samples: Option<SampleCount>,
    /// Inner hit-or-miss points per section when phi = vn.
    #[arg(long)]
    pub inner_samples: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory of cached constants, read and written.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaArgs {
    /// Number of stratified trials.
    #[arg(long)]
    pub trials: Option<SampleCount>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed polygon M (default: a fresh random pair per trial).
    #[arg(long = "M", id = "M")]
    #[serde(rename = "M")]
    pub m: Option<BodyArg>,
    #[arg(long = "L", id = "L")]
    #[serde(rename = "L")]
    pub l: Option<BodyArg>,
}

/// Resolved global settings.
#[derive(Clone, Debug)]
pub struct Settings {
    pub threads: Option<usize>,
    pub shards: u32,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// A finished command: the JSON document and optional CSV table.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: String,
    pub csv: Option<String>,
    pub settings: Settings,
}

/// Body of a command's result before it is wrapped in the envelope.
pub struct Report {
    pub config: Value,
    pub shard_plan: Value,
    pub result: Value,
    pub csv: Option<String>,
}

struct FileConfig {
    global: GlobalArgs,
    command: serde_json::Map<String, Value>,
    dir: PathBuf,
}

const GLOBAL_KEYS: [&str; 4] = ["threads", "shards", "out", "csv"];

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config {} is not JSON: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Validation("config must be a JSON object".into()));
    };
    let mut global = serde_json::Map::new();
    for k in GLOBAL_KEYS {
        if let Some(v) = map.remove(k) {
            global.insert(k.into(), v);
        }
    }
    let global: GlobalArgs = serde_json::from_value(Value::Object(global))
        .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(FileConfig { global, command: map, dir })
}

fn command_config<T: for<'de> Deserialize<'de> + Default>(file: &Option<FileConfig>) -> Result<T, CliError> {
    match file {
        None => Ok(T::default()),
        Some(f) => serde_json::from_value(Value::Object(f.command.clone()))
            .map_err(|e| CliError::Validation(format!("config: {e}"))),
    }
}

fn rebase(body: Option<BodyArg>, file: &Option<FileConfig>) -> Option<BodyArg> {
    match file {
        Some(f) => body.map(|b| b.rebase(&f.dir)),
        None => body,
    }
}

/// Merges config-file values under explicit flags.
fn merge(cli: Cli) -> Result<(Settings, Command), CliError> {
    let file = cli.global.config.as_deref().map(read_config).transpose()?;
    let fg = file.as_ref().map(|f| &f.global);
    let rebase_path = |p: Option<PathBuf>| match (&file, p) {
        (Some(f), Some(p)) if p.is_relative() => Some(f.dir.join(p)),
        (_, p) => p,
    };
    let settings = Settings {
        threads: cli.global.threads.or(fg.and_then(|g| g.threads)),
        shards: cli
            .global
            .shards
            .or(fg.and_then(|g| g.shards))
            .unwrap_or(cartan_core::sampling::DEFAULT_SHARDS),
        out: cli.global.out.clone().or_else(|| rebase_path(fg.and_then(|g| g.out.clone()))),
        csv: cli.global.csv.clone().or_else(|| rebase_path(fg.and_then(|g| g.csv.clone()))),
    };
    if settings.shards == 0 {
        return Err(CliError::Validation("--shards must be positive".into()));
    }
    if settings.threads == Some(0) {
        return Err(CliError::Validation("--threads must be positive".into()));
    }
    let command = match cli.command {
        Command::Intrinsic(a) => {
            let f: IntrinsicArgs = command_config(&file)?;
            Command::Intrinsic(IntrinsicArgs {
                body: a.body.or(rebase(f.body, &file)),
                method: a.method.or(f.method),
                eps: a.eps.or(f.eps),
                samples: a.samples.or(f.samples),
                seed: a.seed.or(f.seed),
            })
        }
        Command::Cj(a) => {
            let f: CjArgs = command_config(&file)?;
            Command::Cj(CjArgs {
                n: a.n.or(f.n),
                j: a.j.or(f.j),
                method: a.method.or(f.method),
                samples: a.samples.or(f.samples),
                seed: a.seed.or(f.seed),
                cache: a.cache.or_else(|| rebase_path(f.cache)),
            })
        }
        Command::Kinematic(a) => {
            let f: KinematicArgs = command_config(&file)?;
            Command::Kinematic(KinematicArgs {
                group: a.group.or(f.group),
                phi: a.phi.or(f.phi),
                m: a.m.or(rebase(f.m, &file)),
                l: a.l.or(rebase(f.l, &file)),
                samples: a.samples.or(f.samples),
                crofton_samples: a.crofton_samples.or(f.crofton_samples),
                c_samples: a.c_samples.or(f.c_samples),
                inner_samples: a.inner_samples.or(f.inner_samples),
                seed: a.seed.or(f.seed),
                cache: a.cache.or_else(|| rebase_path(f.cache)),
            })
        }
        Command::LemmaCheck(a) => {
            let f: LemmaArgs = command_config(&file)?;
            Command::LemmaCheck(LemmaArgs {
                trials: a.trials.or(f.trials),
                seed: a.seed.or(f.seed),
                m: a.m.or(rebase(f.m, &file)),
                l: a.l.or(rebase(f.l, &file)),
            })
        }
    };
    Ok((settings, command))
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs an already parsed command line.
pub fn execute(cli: Cli) -> Result<Output, CliError> {
    let (settings, command) = merge(cli)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = settings.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {} threads: {e}", settings.threads.unwrap_or(0))))?;
    let name = command.name();
    let report = pool.install(|| commands::run(&command, settings.shards))?;
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": name,
        "config": report.config,
        "shard_plan": report.shard_plan,
        "result": report.result,
        "metadata": {
            "timestamp": unix_timestamp(),
            "threads": pool.current_num_threads(),
        },
    });
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(Output {
        json,
        csv: report.csv,
        settings,
    })
}

/// Parses, runs and writes output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    match execute(cli).and_then(write_output) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cartan: {e}");
            e.exit_code()
        }
    }
}

fn write_output(out: Output) -> Result<(), CliError> {
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
    };
    match &out.settings.out {
        Some(p) => write(p, &(out.json.clone() + "\n"))?,
        None => println!("{}", out.json),
    }
    match (&out.settings.csv, &out.csv) {
        (Some(p), Some(csv)) => write(p, csv)?,
        (Some(_), None) => eprintln!("cartan: this command has no tabular output; --csv ignored"),
        _ => {}
    }
    Ok(())
}
