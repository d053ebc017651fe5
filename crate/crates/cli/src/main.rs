//! `episode-rules`: mine, verify, benchmark and generate event sequences.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad configuration or input,
//! 3 verification found diverging rule sets.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use episode_rules::io::{load, write_plain, write_rules, write_stats};
use episode_rules::{
    brute_force_mine, generate_synthetic, mine, DatasetFormat, Episode, EpisodeRule, EventSequence,
    MinConf, MiningParams, Strategies, SyntheticSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "episode-rules",
    version,
    about = "Targeted mining of precise-positioning episode rules"
)]
struct Cli {
    /// Size of the worker pool; defaults to one thread per core.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine the rules of one sequence and write them to a file.
    Mine(MineArgs),
    /// Check that every strategy mask and the brute-force miner agree.
    Verify(VerifyArgs),
    /// Sweep confidence thresholds and strategy masks, writing a CSV row per run.
    Bench(BenchArgs),
    /// Write a seeded synthetic sequence in plain format.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// `plain` (one line per timestamp) or `spmf`.
    #[arg(long, default_value = "plain")]
    format: DatasetFormat,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Query episode as event ids separated by spaces or commas.
    #[arg(long)]
    query: Episode,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    min_sup: u64,
    /// Maximum antecedent span is `delta - 1`.
    #[arg(long)]
    delta: u32,
    /// Maximum distance from antecedent end to consequent end.
    #[arg(long)]
    epsilon: u32,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long)]
    min_conf: MinConf,
    /// Number of pruning strategies enabled, cumulatively, 0 to 4.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(0..=4))]
    strategies: u8,
    #[arg(long)]
    output: PathBuf,
    /// Optional JSON file for run counters.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long)]
    min_conf: MinConf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    query: QueryArgs,
    /// Confidence thresholds to sweep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    confs: Vec<String>,
    /// Name for the `dataset` column; defaults to the input file stem.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    timestamps: u32,
    #[arg(long)]
    alphabet: u32,
    #[arg(long, default_value_t = 5)]
    avg_items: u32,
    #[arg(long, default_value_t = 50)]
    max_items: u32,
    /// Episode to plant, as event ids.
    #[arg(long)]
    plant: Option<Episode>,
    #[arg(long, default_value_t = 0.0)]
    plant_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

enum Failure {
    Io(String),
    Usage(String),
    Diverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Diverged(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Diverged(m) => m,
        }
    }
}

impl From<episode_rules::Error> for Failure {
    fn from(e: episode_rules::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// Parses `argv` and executes one subcommand, returning the process exit code.
fn run(argv: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    let outcome = match cli.threads {
        None => dispatch(cli.command),
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Usage(format!(
                "cannot start {n} worker threads: {e}"
            ))),
        },
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Mine(a) => run_mine(a),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench(a),
        Command::Gen(a) => run_gen(a),
    }
}

fn params(
    q: &QueryArgs,
    min_conf: MinConf,
    strategies: Strategies,
) -> Result<MiningParams, Failure> {
    let params = MiningParams {
        query: q.query.clone(),
        min_sup: q.min_sup,
        min_conf,
        delta: q.delta,
        epsilon: q.epsilon,
        strategies,
    };
    params.validate()?;
    Ok(params)
}

fn load_input(input: &InputArgs) -> Result<EventSequence, Failure> {
    Ok(load(&input.input, input.format)?)
}

fn run_mine(a: MineArgs) -> Result<(), Failure> {
    let strategies = Strategies::new(a.strategies)?;
    let params = params(&a.query, a.min_conf, strategies)?;
    let seq = load_input(&a.input)?;
    let result = mine(&seq, &params)?;
    write_rules(&result.rules, &a.output)?;
    if let Some(path) = &a.stats {
        write_stats(&result.stats, path)?;
    }
    eprintln!(
        "{} rules from {} candidates in {:.1} ms",
        result.stats.rules_final, result.stats.candidates_emitted, result.stats.wall_time_ms
    );
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let base = params(&a.query, a.min_conf, Strategies::NONE)?;
    let seq = load_input(&a.input)?;
    let reference = brute_force_mine(&seq, &base)?;
    for strategies in Strategies::all_masks() {
        let p = MiningParams {
            strategies,
            ..base.clone()
        };
        let mined = mine(&seq, &p)?.rules;
        if let Some(diff) = first_divergence(&reference, &mined) {
            return Err(Failure::Diverged(format!(
                "mask {} disagrees with brute force: {diff}",
                strategies.count()
            )));
        }
    }
    println!(
        "ok: {} rules, identical under masks 0-4 and brute force",
        reference.len()
    );
    Ok(())
}

fn first_divergence(expected: &[EpisodeRule], actual: &[EpisodeRule]) -> Option<String> {
    let mut i = 0;
    let mut j = 0;
    loop {
        match (expected.get(i), actual.get(j)) {
            (None, None) => return None,
            (Some(e), Some(a)) if e == a => {
                i += 1;
                j += 1;
            }
            (Some(e), Some(a)) if e.key() == a.key() => {
                return Some(format!("expected {e}, got {a}"))
            }
            (Some(e), Some(a)) if e < a => return Some(format!("missing {e}")),
            (Some(e), None) => return Some(format!("missing {e}")),
            (_, Some(a)) => return Some(format!("unexpected {a}")),
        }
    }
}

fn run_bench(a: BenchArgs) -> Result<(), Failure> {
    let confs = a
        .confs
        .iter()
        .map(|c| c.parse::<MinConf>().map(|m| (c.trim(), m)))
        .collect::<Result<Vec<_>, _>>()?;
    let base = params(&a.query, confs[0].1, Strategies::NONE)?;
    let seq = load_input(&a.input)?;
    let dataset = a.dataset.clone().unwrap_or_else(|| stem(&a.input.input));

    let mut csv = String::from("dataset,minconf,mask,candidates,rules,wall_ms\n");
    for &(label, min_conf) in &confs {
        for strategies in Strategies::all_masks() {
            let p = MiningParams {
                min_conf,
                strategies,
                ..base.clone()
            };
            let s = mine(&seq, &p)?.stats;
            let _ = writeln!(
                csv,
                "{dataset},{label},{},{},{},{:.3}",
                strategies.count(),
                s.candidates_emitted,
                s.rules_final,
                s.wall_time_ms
            );
        }
    }
    fs::write(&a.output, csv).map_err(|e| Failure::Io(format!("{}: {e}", a.output.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

fn run_gen(a: GenArgs) -> Result<(), Failure> {
    let spec = SyntheticSpec {
        num_timestamps: a.timestamps,
        alphabet_size: a.alphabet,
        avg_items: a.avg_items,
        max_items: a.max_items,
        planted_query: a.plant,
        plant_rate: a.plant_rate,
        seed: a.seed,
    };
    let seq = generate_synthetic(&spec)?;
    write_plain(&seq, &a.output)?;
    Ok(())
}
