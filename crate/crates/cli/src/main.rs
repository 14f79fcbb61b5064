mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hvf_core::cloud::{canonical_cloud_with, random_cloud_with, DEFAULT_POINTS};
use hvf_core::corpus::{cardinality, enumerate, function_at, spec_from_names, BasisSpec};
use hvf_core::datakit::{self, DataError, GenerateOptions, VerifyOptions};
use hvf_core::expr::{parse_with_constants, Expr, HamFunction};
use hvf_core::hamfield::{eval_field, hamiltonian_field, DemoSystem};
use hvf_core::raster::{render, RenderConfig};
use hvf_core::rational::{self, Rational};
use hvf_core::tokens::{
    distance_jaccard, distance_levenshtein, token_distance, token_set, tokens_of, written_tokens,
    TokenVocab,
};
use num_bigint::BigUint;
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Validation(String),
    Verify(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Verify(m) | CliError::Io(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Io { .. } => CliError::Io(e.to_string()),
            DataError::Raster(hvf_core::raster::RasterError::Io(_)) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Hamiltonian vector-field datasets and metrics.
#[derive(Debug, Parser)]
#[command(name = "hvf", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Print the number of functions in a corpus
    Card(SpecArgs),
    /// Print canonical strings for a range of corpus indices
    Enum(EnumArgs),
    /// Print the Hamiltonian vector field of an expression
    Field(FieldArgs),
    /// Render the three-channel image of one Hamiltonian over one cloud
    Render(RenderArgs),
    /// Generate a dataset
    Gen(GenArgs),
    /// Re-derive and check a dataset
    Verify(VerifyArgs),
    /// Distance between two Hamiltonians
    Dist(DistArgs),
    /// Write the token vocabulary of a corpus
    Vocab(VocabArgs),
    /// Score a predictions file against a dataset
    Score(ScoreArgs),
}

#[derive(Debug, Args, Serialize)]
struct SpecArgs {
    /// Basis b1..b5 (maximum monomial degree)
    #[arg(long)]
    basis: String,
    /// Coefficient set d3|d5|d7|d9
    #[arg(long)]
    delta: String,
    /// Add sin(x), sin(y), cos(x), cos(y) to the basis
    #[arg(long)]
    trig: bool,
}

impl SpecArgs {
    fn spec(&self) -> Result<BasisSpec, CliError> {
        spec_from_names(&self.basis, &self.delta, self.trig).map_err(invalid)
    }
}

#[derive(Debug, Args, Serialize)]
struct EnumArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// First index
    #[arg(long, default_value = "0")]
    start: String,
    /// Number of functions (default: to the end of the corpus)
    #[arg(long)]
    count: Option<u64>,
    /// Prefix each line with its index and a tab
    #[arg(long)]
    with_index: bool,
}

#[derive(Debug, Args, Serialize)]
struct HamSource {
    /// Expression in x and y
    #[arg(long, conflicts_with = "demo")]
    ham: Option<String>,
    /// Named system: harmonic, pendulum, lotka_volterra, sis
    #[arg(long)]
    demo: Option<String>,
    /// Constant substitution name=value, repeatable
    #[arg(long = "const", value_name = "NAME=VALUE")]
    constants: Vec<String>,
}

impl HamSource {
    fn constants(&self) -> Result<BTreeMap<String, Rational>, CliError> {
        self.constants
            .iter()
            .map(|kv| {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--const expects NAME=VALUE, got {kv:?}")))?;
                let v = rational::parse_rational(v)
                    .map_err(|_| invalid(format!("bad constant value {v:?}")))?;
                Ok((k.trim().to_string(), v))
            })
            .collect()
    }

    fn expr(&self) -> Result<Option<Expr>, CliError> {
        let constants = self.constants()?;
        match (&self.ham, &self.demo) {
            (Some(text), None) => Ok(Some(parse_with_constants(text, &constants).map_err(invalid)?)),
            (None, Some(name)) => {
                let mut demo = DemoSystem::by_name(name)
                    .ok_or_else(|| invalid(format!("unknown demo system {name:?}")))?;
                for (k, v) in constants {
                    if !demo.set(&k, v) {
                        return Err(invalid(format!("{name} has no constant {k:?}")));
                    }
                }
                Ok(Some(demo.hamiltonian().map_err(invalid)?))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct FieldArgs {
    #[command(flatten)]
    source: HamSource,
    /// Print {"dx": ..., "dy": ...}
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args, Serialize)]
struct RenderArgs {
    #[command(flatten)]
    source: HamSource,
    /// Corpus function instead of an expression: basis, delta and index
    #[arg(long, requires_all = ["delta", "index"])]
    basis: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    trig: bool,
    #[arg(long)]
    index: Option<String>,
    /// Cloud id, 0 for the lattice
    #[arg(long, default_value_t = 0)]
    cloud: u32,
    /// Master seed, required for random clouds
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 128)]
    resolution: u32,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Output path without extension
    #[arg(long)]
    out: PathBuf,
    /// Skip the PNG files
    #[arg(long)]
    no_png: bool,
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Master seed
    #[arg(long)]
    seed: u64,
    /// Output directory (must be empty or absent)
    #[arg(long)]
    out: PathBuf,
    /// Use only the first N corpus functions
    #[arg(long)]
    limit: Option<u64>,
    /// Shard k/m of the corpus index range
    #[arg(long, default_value = "0/1")]
    shard: String,
    #[arg(long, default_value_t = 128)]
    resolution: u32,
    /// Train fraction
    #[arg(long, default_value = "0.75")]
    split_fraction: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_png: bool,
    /// Points per cloud (a perfect square)
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    dataset: PathBuf,
    /// Share of records re-rendered and byte-compared
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Metric {
    Euclid,
    Jaccard,
    Levenshtein,
}

#[derive(Debug, Args, Serialize)]
struct DistArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, value_enum, default_value = "euclid")]
    metric: Metric,
    /// Levenshtein over terms in the order written rather than canonical order
    #[arg(long)]
    as_written: bool,
}

#[derive(Debug, Args, Serialize)]
struct VocabArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ScoreArgs {
    dataset: PathBuf,
    predictions: PathBuf,
    /// Include per-sample distances
    #[arg(long)]
    per_sample: bool,
}

fn card(a: &SpecArgs) -> Result<(), CliError> {
    println!("{}", cardinality(&a.spec()?));
    Ok(())
}

fn enumerate_cmd(a: &EnumArgs) -> Result<(), CliError> {
    let spec = a.spec.spec()?;
    let size = cardinality(&spec);
    let lo = BigUint::from_str(&a.start).map_err(|_| invalid(format!("bad index {:?}", a.start)))?;
    let hi = match a.count {
        Some(n) => &lo + n,
        None => size,
    };
    let iter = enumerate(&spec, &lo, &hi).map_err(invalid)?;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    use std::io::Write;
    for (j, f) in iter {
        let line = if a.with_index {
            writeln!(out, "{j}\t{f}")
        } else {
            writeln!(out, "{f}")
        };
        if line.is_err() {
            // closed pipe
            return Ok(());
        }
    }
    out.flush().ok();
    Ok(())
}

fn field(a: &FieldArgs) -> Result<(), CliError> {
    let h = a
        .source
        .expr()?
        .ok_or_else(|| CliError::Usage("field needs --ham or --demo".into()))?;
    let f = hamiltonian_field(&h);
    if a.json {
        println!("{}", serde_json::to_string(&f.to_json()).expect("json"));
    } else {
        println!("dx: {}", f.dx);
        println!("dy: {}", f.dy);
    }
    Ok(())
}

fn render_cmd(a: &RenderArgs) -> Result<(), CliError> {
    let h = match (a.source.expr()?, &a.basis) {
        (Some(e), None) => e,
        (None, Some(basis)) => {
            let spec = spec_from_names(basis, a.delta.as_deref().unwrap_or(""), a.trig).map_err(invalid)?;
            let text = a.index.as_deref().unwrap_or("");
            let j = BigUint::from_str(text).map_err(|_| invalid(format!("bad index {text:?}")))?;
            function_at(&j, &spec).map_err(invalid)?.to_expr()
        }
        _ => return Err(CliError::Usage("render needs exactly one of --ham, --demo, --basis".into())),
    };
    let cfg = RenderConfig::with_resolution(a.resolution).map_err(invalid)?;
    let cloud = if a.cloud == 0 {
        canonical_cloud_with(a.points).map_err(invalid)?
    } else {
        let seed = a
            .seed
            .ok_or_else(|| CliError::Usage("random clouds need --seed".into()))?;
        random_cloud_with(seed, a.cloud, a.points).map_err(invalid)?
    };
    let field = hamiltonian_field(&h);
    let compiled = field.compile();
    let sample = eval_field(&compiled, &cloud);
    let raster = render(&sample, &compiled, &cfg);
    let tensor = a.out.with_file_name(format!(
        "{}.symf",
        a.out.file_name().unwrap_or_default().to_string_lossy()
    ));
    raster
        .write_tensor(&tensor)
        .map_err(|e| CliError::Io(format!("{}: {e}", tensor.display())))?;
    let pngs = if a.no_png {
        Vec::new()
    } else {
        raster
            .write_pngs(&a.out)
            .map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?
            .to_vec()
    };
    let summary = serde_json::json!({
        "hamiltonian": h.to_string(),
        "field": field.to_json(),
        "cloud": a.cloud,
        "seed": a.seed,
        "nan_points": sample.nan_count(),
        "tensor": tensor,
        "png": pngs,
        "render": cfg,
    });
    println!("{summary}");
    Ok(())
}

fn parse_shard(s: &str) -> Result<(u32, u32), CliError> {
    s.split_once('/')
        .and_then(|(k, m)| Some((k.trim().parse().ok()?, m.trim().parse().ok()?)))
        .ok_or_else(|| CliError::Usage(format!("--shard expects k/m, got {s:?}")))
}

fn gen(a: &GenArgs) -> Result<(), CliError> {
    let spec = a.spec.spec()?;
    let (shard_index, shard_count) = parse_shard(&a.shard)?;
    let split_fraction = rational::parse_rational(&a.split_fraction)
        .map_err(|_| invalid(format!("bad split fraction {:?}", a.split_fraction)))?;
    let opts = GenerateOptions {
        limit: a.limit,
        shard_index,
        shard_count,
        render: RenderConfig::with_resolution(a.resolution).map_err(invalid)?,
        split_fraction,
        workers: a.workers,
        png: !a.no_png,
        points: a.points,
        ..GenerateOptions::default()
    };
    let manifest = datakit::generate(&spec, a.seed, &a.out, &opts)?;
    println!("{}", serde_json::to_string(&manifest).expect("json"));
    Ok(())
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&a.fraction) {
        return Err(invalid("--fraction must lie in [0, 1]"));
    }
    let report = datakit::verify(
        &a.dataset,
        &VerifyOptions {
            fraction: a.fraction,
            workers: a.workers,
        },
    )?;
    println!("{}", serde_json::to_string(&report).expect("json"));
    if report.ok() {
        Ok(())
    } else {
        let ids: Vec<String> = report.offending_samples().iter().map(u64::to_string).collect();
        for f in &report.failures {
            eprintln!("{}: sample {:?}: {}", f.check, f.sample_id, f.detail);
        }
        Err(CliError::Verify(format!(
            "verification failed: {} problems; offending sample_ids: [{}]",
            report.failures.len(),
            ids.join(", ")
        )))
    }
}

fn dist(a: &DistArgs) -> Result<(), CliError> {
    let f = HamFunction::parse(&a.a).map_err(|e| invalid(format!("--a: {e}")))?;
    let g = HamFunction::parse(&a.b).map_err(|e| invalid(format!("--b: {e}")))?;
    match a.metric {
        Metric::Euclid => println!("{}", token_distance(&f, &g)),
        Metric::Jaccard => println!("{}", distance_jaccard(&token_set(&f), &token_set(&g))),
        Metric::Levenshtein => {
            let (x, y) = if a.as_written {
                (
                    written_tokens(&a.a).map_err(invalid)?,
                    written_tokens(&a.b).map_err(invalid)?,
                )
            } else {
                (tokens_of(&f), tokens_of(&g))
            };
            println!("{}", distance_levenshtein(&x, &y));
        }
    }
    Ok(())
}

fn vocab(a: &VocabArgs) -> Result<(), CliError> {
    let json = TokenVocab::build(&a.spec.spec()?).to_json();
    match &a.out {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn score(a: &ScoreArgs) -> Result<(), CliError> {
    let mut report = datakit::score_predictions(&a.dataset, &a.predictions)?;
    if !a.per_sample {
        report.samples.clear();
    }
    println!("{}", serde_json::to_string(&report).expect("json"));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    eprintln!("{}", serde_json::to_string(&cli.command).expect("json"));
    match &cli.command {
        Command::Card(a) => card(a),
        Command::Enum(a) => enumerate_cmd(a),
        Command::Field(a) => field(a),
        Command::Render(a) => render_cmd(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Dist(a) => dist(a),
        Command::Vocab(a) => vocab(a),
        Command::Score(a) => score(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(config::ConfigError(m)) => {
            eprintln!("error: config: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
