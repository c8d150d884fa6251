//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use locc_core::mas::Verdict;
use locc_core::oracle::genericity_sample;
use locc_core::pipeline::{analyze, Analysis, AnalysisConfig};
use locc_core::protocol::{simulate, Protocol};
use locc_core::states::{bell_family, spectral_decompose};
use locc_core::{Side, DEFAULT_TOL};

use crate::error::{CliError, Result};
use crate::format::{parse_state_set, ProtocolDoc, StateSetDoc};
use crate::json;
use crate::report::{sha256_hex, AnalysisReport, GenericityDoc, SimulateReport, SimulationReport, VERSION};

pub const EXIT_DISTINGUISHABLE: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "locc", version, about = "One-way LOCC distinguishability of orthogonal bipartite states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide distinguishability for each initiating party and build protocols
    Analyze(AnalyzeArgs),
    /// Monte-Carlo run of a protocol on a state set
    Simulate(SimulateArgs),
    /// Histogram dim T⊥ over Haar-random pure families
    SampleGeneric(SampleArgs),
    /// Write a state-set file of generalized Bell states
    GenFixture(FixtureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::A => vec![Side::A],
            SideArg::B => vec![Side::B],
            SideArg::Both => Side::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Initiating party
    #[arg(long, value_enum, default_value = "both")]
    pub side: SideArg,
    /// Relative rank tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo trials (0 skips simulation)
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Output file (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// State-set JSON file
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Oracle restarts on inconclusive sides (0 disables the search)
    #[arg(long, default_value_t = 0)]
    pub oracle_attempts: usize,
    /// Also write the first protocol found as a standalone file
    #[arg(long)]
    pub protocol_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// State-set JSON file
    pub input: PathBuf,
    /// Protocol file; when absent the protocol comes from a fresh analysis
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Oracle restarts when the analysis is inconclusive
    #[arg(long, default_value_t = 64)]
    pub oracle_attempts: usize,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include Det(M Mᵀ) of the stacked generators for each sample
    #[arg(long)]
    pub det: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated labels `nm` (or `n:m` when d > 10)
    #[arg(long)]
    pub indices: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn config(c: &CommonArgs, oracle_attempts: usize) -> Result<AnalysisConfig> {
    if !(c.tol > 0.0 && c.tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {}", c.tol)));
    }
    Ok(AnalysisConfig {
        tol: c.tol,
        seed: c.seed,
        sides: c.side.sides(),
        trials: c.trials,
        oracle_attempts,
    })
}

fn load(input: &Path, tol: f64) -> Result<(Vec<u8>, locc_core::StateSet)> {
    let bytes = read(input)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Schema(format!("input is not UTF-8: {e}")))?;
    let set = parse_state_set(text, tol)?;
    Ok((bytes, set))
}

/// Exit status from per-side outcomes. A verified oracle witness counts as
/// distinguishable: the protocol it carries has been checked directly.
pub fn analysis_exit_code(analysis: &Analysis) -> i32 {
    let sides = &analysis.sides;
    if sides.iter().any(|s| s.decision.verdict.is_distinguishable() || s.witness.is_some()) {
        EXIT_DISTINGUISHABLE
    } else if sides.iter().all(|s| s.decision.verdict == Verdict::NotDistinguishable) {
        EXIT_REFUTED
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn first_protocol(analysis: &Analysis) -> Option<(&'static str, &Protocol)> {
    analysis.sides.iter().find_map(|s| {
        s.protocol
            .as_ref()
            .map(|p| ("analysis", p))
            .or_else(|| s.witness.as_ref().map(|w| ("oracle", &w.protocol)))
    })
}

pub fn run_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let cfg = config(&args.common, args.oracle_attempts)?;
    let (bytes, set) = load(&args.input, cfg.tol)?;
    let analysis = analyze(&set, &cfg)?;
    let report = AnalysisReport::new(&analysis, &cfg, &bytes);
    emit(args.common.out.as_deref(), &json::to_string(&report)?)?;
    if let Some(path) = &args.protocol_out {
        let (_, proto) = first_protocol(&analysis)
            .ok_or_else(|| CliError::NoProtocol(String::from("no side produced a protocol")))?;
        let text = json::to_string(&ProtocolDoc::from_protocol(proto))?;
        fs::write(path, text).map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    Ok(analysis_exit_code(&analysis))
}

pub fn run_simulate(args: &SimulateArgs) -> Result<i32> {
    let cfg = config(&args.common, args.oracle_attempts)?;
    let (bytes, set) = load(&args.input, cfg.tol)?;
    let (source, proto, spectral) = match &args.protocol {
        Some(path) => {
            let text = read(path)?;
            let doc: ProtocolDoc = serde_json::from_slice(&text)?;
            let proto = doc.to_protocol()?;
            let spectral = spectral_decompose(&set.pad_to_square(), cfg.tol)?;
            if proto.alice.dim() != spectral.dim() {
                return Err(CliError::Schema(format!(
                    "protocol acts on dimension {}, states on {}",
                    proto.alice.dim(),
                    spectral.dim()
                )));
            }
            (format!("file:{}", sha256_hex(&text)), proto, spectral)
        }
        None => {
            // the analysis itself does not need to simulate
            let analysis = analyze(&set, &AnalysisConfig { trials: 0, ..cfg.clone() })?;
            let (source, proto) = first_protocol(&analysis)
                .map(|(s, p)| (s.to_string(), p.clone()))
                .ok_or_else(|| CliError::NoProtocol(String::from("analysis found no protocol on the requested sides")))?;
            (source, proto, analysis.spectral)
        }
    };
    let stats = simulate(&spectral, &proto, cfg.trials, cfg.seed)?;
    let report = SimulateReport {
        tool: "locc",
        version: VERSION,
        input_sha256: sha256_hex(&bytes),
        protocol_source: source,
        side: proto.alice.side.as_str(),
        op_violation: proto.op_violation,
        simulation: SimulationReport::from(&stats),
    };
    emit(args.common.out.as_deref(), &json::to_string(&report)?)?;
    Ok(if stats.perfect() { EXIT_DISTINGUISHABLE } else { EXIT_REFUTED })
}

pub fn run_sample_generic(args: &SampleArgs) -> Result<i32> {
    let report = genericity_sample(args.d, args.n, args.samples, args.seed, args.det)?;
    emit(args.out.as_deref(), &json::to_string(&GenericityDoc::from(&report))?)?;
    Ok(EXIT_DISTINGUISHABLE)
}

/// Parses `00,01,10,33` (or `0:0,1:2`).
pub fn parse_indices(s: &str) -> Result<Vec<(usize, usize)>> {
    let bad = |item: &str| CliError::Usage(format!("bad index label {item:?}; expected `nm` or `n:m`"));
    s.split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| {
            if let Some((n, m)) = item.split_once(':') {
                let n = n.trim().parse().map_err(|_| bad(item))?;
                let m = m.trim().parse().map_err(|_| bad(item))?;
                return Ok((n, m));
            }
            let digits: Vec<u32> = item.chars().map(|c| c.to_digit(10)).collect::<Option<_>>().ok_or_else(|| bad(item))?;
            match digits[..] {
                [n, m] => Ok((n as usize, m as usize)),
                _ => Err(bad(item)),
            }
        })
        .collect()
}

pub fn run_gen_fixture(args: &FixtureArgs) -> Result<i32> {
    if args.d == 0 {
        return Err(CliError::Usage(String::from("--d must be positive")));
    }
    let indices = parse_indices(&args.indices)?;
    if indices.is_empty() {
        return Err(CliError::Usage(String::from("--indices is empty")));
    }
    let set = bell_family(args.d, &indices, DEFAULT_TOL)?;
    emit(args.out.as_deref(), &json::to_string(&StateSetDoc::from_set(&set))?)?;
    Ok(EXIT_DISTINGUISHABLE)
}

/// Runs a parsed command; errors are printed and mapped to
/// [`EXIT_INPUT_ERROR`].
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Simulate(a) => run_simulate(a),
        Command::SampleGeneric(a) => run_sample_generic(a),
        Command::GenFixture(a) => run_gen_fixture(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}
