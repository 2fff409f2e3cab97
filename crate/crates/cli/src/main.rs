//! `isoembed`: build and check isometric embeddings of Hamming space into
//! edit space.
//!
//! Every command prints one JSON report (or a text rendering of it) that
//! echoes the full configuration and the SHA-256 of every file read or
//! written. Exit status: 0 on success, 1 when a check fails or a violation
//! is found, 2 on usage and I/O errors.

mod commands;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{render_text, Report, Status};

#[derive(Debug, Parser, Serialize)]
#[command(name = "isoembed", version, about = "Isometric embeddings of the Hamming metric into the edit metric")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ISOEMBED_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a locally self-matching string.
    GenLsm(GenLsmArgs),
    /// Check a locally self-matching string file.
    CheckLsm(CheckLsmArgs),
    /// Search for a misaligner.
    SearchMisaligner(SearchArgs),
    /// Check the four misaligner properties.
    CheckMisaligner(CheckMisalignerArgs),
    /// Build an embedding spec file.
    BuildEmbedding(BuildArgs),
    /// Apply an embedding to one input string.
    Embed(EmbedArgs),
    /// Compare edit distances of images with Hamming distances of inputs.
    VerifyIsometry(VerifyIsometryArgs),
    /// Recover the interleaved structure of an embedding.
    ExtractStructure(ExtractArgs),
    /// Run the shift-alignment attack on an interleaved map.
    Attack(AttackArgs),
    /// Rates and parameters of embedding specs.
    RateReport(RateReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenLsm(_) => "gen-lsm",
            Command::CheckLsm(_) => "check-lsm",
            Command::SearchMisaligner(_) => "search-misaligner",
            Command::CheckMisaligner(_) => "check-misaligner",
            Command::BuildEmbedding(_) => "build-embedding",
            Command::Embed(_) => "embed",
            Command::VerifyIsometry(_) => "verify-isometry",
            Command::ExtractStructure(_) => "extract-structure",
            Command::Attack(_) => "attack",
            Command::RateReport(_) => "rate-report",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenLsmArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Alphabet size.
    #[arg(long)]
    pub sigma: u64,
    #[arg(long)]
    pub n: usize,
    /// Exclusion window for the initial draw; allows alphabets below the
    /// guaranteed size.
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckLsmArgs {
    pub file: PathBuf,
    /// Defaults to the epsilon recorded in the file.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 8)]
    pub t: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = isoembed::misaligner::search::DEFAULT_RANK_FRAC)]
    pub rank_frac: f64,
    /// Random codeword pairs sampled to calibrate the filters.
    #[arg(long, default_value_t = 2000)]
    pub preprocess: usize,
    /// Maximum number of candidate codewords.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Conservative,
    Exact,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckMisalignerArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Conservative)]
    pub mode: Mode,
    /// Largest wildcard count settled by enumeration in exact mode.
    #[arg(long, default_value_t = isoembed::misaligner::DEFAULT_EXACT_CAP)]
    pub gamma_cap: usize,
    /// Check at this alpha instead of the one in the file.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Misaligner,
    ThirdRate,
    Product,
    Folklore,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Misaligner file (misaligner family).
    #[arg(long)]
    pub misaligner: Option<PathBuf>,
    /// Slack of the locally self-matching string (misaligner family).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Target rate as `a/b` or a decimal (third-rate family).
    #[arg(long)]
    pub rate: Option<String>,
    /// Rate deficit as `a/b` or a decimal (third-rate and product families).
    #[arg(long)]
    pub rho: Option<String>,
    /// Block length factor (folklore family).
    #[arg(long, default_value_t = isoembed::embed::DEFAULT_FOLKLORE_C)]
    pub c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Binary digits, or whitespace-separated symbols.
    #[arg(long)]
    pub input: String,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyIsometryArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, conflicts_with = "sampled", required_unless_present = "sampled")]
    pub exhaustive: bool,
    #[arg(long)]
    pub sampled: bool,
    /// Rebuild the spec for inputs of this length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Skip the distance-1 and distance-2 neighbours of sampled points.
    #[arg(long)]
    pub no_neighbors: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub probe_budget: usize,
    /// Fresh random inputs used to confirm the recovered structure.
    #[arg(long, default_value_t = 1000)]
    pub check_probes: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AttackArgs {
    #[arg(long, conflicts_with = "synthetic_rate", required_unless_present = "synthetic_rate")]
    pub spec: Option<PathBuf>,
    /// Attack a binary interleaved map of this rate with all-zero frozen
    /// symbols instead of a spec.
    #[arg(long)]
    pub synthetic_rate: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub max_delta: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RateReportArgs {
    #[arg(long = "spec")]
    pub specs: Vec<PathBuf>,
    /// Misaligner parameters `m,k,t,alpha` for a row without a spec file.
    #[arg(long)]
    pub params: Option<String>,
    /// Slack used with `--params`.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

/// A usage, I/O or construction error; the process exits with status 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl From<isoembed::Error> for Failure {
    fn from(e: isoembed::Error) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 2) as u8);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let config = serde_json::to_value(&cli).expect("config serializes");
    let start = Instant::now();
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = Report {
        tool: "isoembed",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: &config,
        inputs: &outcome.inputs,
        outputs: &outcome.outputs,
        status: outcome.status,
        payload: &outcome.payload,
        elapsed_ms: start.elapsed().as_millis(),
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => render_text(&report, &outcome.text),
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
    match outcome.status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(1),
    }
}
