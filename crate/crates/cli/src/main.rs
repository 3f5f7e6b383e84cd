//! `mastermind`: score strings, run attacks against a simulated oracle, build
//! variation models, generate and simulate corpora, and emit or check
//! reduction instances.
//!
//! Results go to standard output as `key=value` lines; progress and warnings
//! go to standard error. Exit status is 0 on success, 1 when a check comes out
//! negative (`mmsat check`), and 2 on errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mastermind_core::attack::general::run_general_attack;
use mastermind_core::attack::indel::run_indel_attack_detailed;
use mastermind_core::attack::substitution::run_substitution_attack;
use mastermind_core::harness::{
    build_variation_model, corpus_stats, generate_synthetic_corpus_with, histogram_csv,
    load_reference, load_sequences, simulate_attacks, stats_of, AttackKind, CorpusStats,
    InputFormat, LoadOptions, SynthConfig,
};
use mastermind_core::satisfiability::{
    brute_force_satisfiable, reduce_3dm, verify_witness, MastermindInstance, ThreeDmInstance,
};
use mastermind_core::scoring::{
    black_peg_score, hamming_distance, lcs_score, levenshtein_distance, white_peg_score,
};
use mastermind_core::{Alphabet, AttackResult, Oracle, Sequence, VariationModel};

#[derive(Parser)]
#[command(
    name = "mastermind",
    version,
    about = "Score-only string recovery toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score two strings against each other.
    Score(ScoreArgs),
    /// Recover a secret from a file through a simulated oracle.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Variation models.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Corpus generation and statistics.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Attack every sequence of a corpus and report guess counts.
    Simulate(SimulateArgs),
    /// Reduce a 3-dimensional matching instance to a Mastermind instance.
    #[command(name = "reduce3dm")]
    Reduce3dm(ReduceArgs),
    /// Mastermind satisfiability.
    #[command(subcommand)]
    Mmsat(MmsatCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreMode {
    Black,
    White,
    Lcs,
    Hamming,
    Lev,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long, value_enum)]
    mode: ScoreMode,
    /// Alphabet symbols in cyclic order; defaults to the symbols of A and B.
    #[arg(long)]
    alphabet: Option<String>,
    a: String,
    b: String,
}

#[derive(Args)]
struct AlphabetArg {
    /// Alphabet symbols in cyclic order.
    #[arg(long, default_value = "ACGT")]
    alphabet: String,
}

impl AlphabetArg {
    fn get(&self) -> Result<Alphabet> {
        Alphabet::new(&self.alphabet).with_context(|| format!("alphabet {:?}", self.alphabet))
    }
}

#[derive(Subcommand)]
enum AttackCommand {
    /// The distribution-free LCS attack.
    General {
        #[arg(long)]
        secret: PathBuf,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// The black-peg attack on substitution-only secrets.
    Sub(ModelAttackArgs),
    /// The two-phase LCS attack on deletions and insertions.
    Indel(ModelAttackArgs),
}

#[derive(Args)]
struct ModelAttackArgs {
    #[arg(long)]
    secret: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    alphabet: AlphabetArg,
}

#[derive(Args)]
struct CorpusInput {
    /// Corpus file layout.
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    /// Drop records with symbols outside the alphabet instead of failing.
    #[arg(long)]
    skip_invalid: bool,
}

impl CorpusInput {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            format: match self.format {
                FormatArg::Auto => InputFormat::Auto,
                FormatArg::Fasta => InputFormat::Fasta,
                FormatArg::Lines => InputFormat::Lines,
            },
            skip_invalid: self.skip_invalid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Fasta,
    Lines,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Build a model from the union of sites where a corpus differs from the
    /// reference.
    Build {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Generate seeded variants of a reference as FASTA.
    Synth {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        count: usize,
        /// Per-kind event count moments, `subs=MEAN:SD,del=MEAN:SD,ins=MEAN:SD`.
        #[arg(long)]
        stats: CorpusStats,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output FASTA file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of shared variable sites (default: reference length / 10).
        #[arg(long)]
        sites: Option<usize>,
        /// Minimum distance between variable sites.
        #[arg(long, default_value_t = SynthConfig::DEFAULT.min_spacing)]
        min_spacing: usize,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Mean and standard deviation of event counts against the reference.
    Stats {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    kind: AttackKind,
    /// Per-sequence report CSV.
    #[arg(long)]
    out: PathBuf,
    /// Guess-count histogram CSV.
    #[arg(long)]
    hist: PathBuf,
    #[arg(long, default_value_t = 50)]
    bin_width: usize,
    #[command(flatten)]
    input: CorpusInput,
    #[command(flatten)]
    alphabet: AlphabetArg,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output instance; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MmsatCommand {
    /// Check a witness, or search for one exhaustively.
    Check(CheckArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("how").required(true).args(["witness", "brute"]))]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// File holding a candidate secret in the instance's symbols.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Search every candidate secret, with pruning.
    #[arg(long)]
    brute: bool,
    /// Refuse searches whose candidate space exceeds this size.
    #[arg(long, default_value_t = 1u128 << 64, requires = "brute")]
    limit: u128,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Score(args) => score(args)?,
        Command::Attack(cmd) => attack(cmd)?,
        Command::Model(ModelCommand::Build {
            reference,
            corpus,
            out,
            input,
            alphabet,
        }) => {
            let alphabet = alphabet.get()?;
            let reference = load_reference(&reference, &alphabet)?;
            let corpus = load_sequences(&corpus, &alphabet, input.options())?;
            let build = build_variation_model(&corpus, &reference)?;
            write(&out, &build.model.to_text())?;
            println!("sequences={}", corpus.len());
            println!("M={}", build.model.m());
            println!("insertion_sites={}", build.model.insertion_sites().len());
            println!("separator_violations={}", build.separator_violations.len());
            if !build.separator_violations.is_empty() {
                eprintln!(
                    "warning: insertion gaps flanked by deletion candidates: {}",
                    join(&build.separator_violations)
                );
            }
        }
        Command::Corpus(cmd) => corpus(cmd)?,
        Command::Simulate(args) => simulate(args)?,
        Command::Reduce3dm(args) => {
            let inst =
                ThreeDmInstance::parse(&read(&args.input)?, &args.input.display().to_string())?;
            let mm = reduce_3dm(&inst);
            eprintln!(
                "N={} K={} queries={}",
                mm.len(),
                mm.colors(),
                mm.queries().len()
            );
            match &args.out {
                Some(path) => write(path, &mm.to_text())?,
                None => print!("{}", mm.to_text()),
            }
        }
        Command::Mmsat(MmsatCommand::Check(args)) => return check(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn score(args: ScoreArgs) -> Result<()> {
    let alphabet = match &args.alphabet {
        Some(symbols) => Alphabet::new(symbols)?,
        None => {
            let mut symbols: Vec<char> = args.a.chars().chain(args.b.chars()).collect();
            symbols.sort_unstable();
            symbols.dedup();
            if symbols.is_empty() {
                Alphabet::dna()
            } else {
                Alphabet::from_symbols(symbols)?
            }
        }
    };
    let q = alphabet.parse(&args.a).context("first string")?;
    let v = alphabet.parse(&args.b).context("second string")?;
    let value = match args.mode {
        ScoreMode::Black => black_peg_score(&q, &v)?,
        ScoreMode::White => white_peg_score(&q, &v)?,
        ScoreMode::Lcs => lcs_score(&q, &v),
        ScoreMode::Hamming => hamming_distance(&q, &v)?,
        ScoreMode::Lev => levenshtein_distance(&q, &v),
    };
    println!("{}", value.value());
    Ok(())
}

fn attack(cmd: AttackCommand) -> Result<()> {
    match cmd {
        AttackCommand::General { secret, alphabet } => {
            let alphabet = alphabet.get()?;
            let secret = load_reference(&secret, &alphabet)?;
            let mut oracle = Oracle::new(alphabet.clone(), secret.clone())?;
            let result = run_general_attack(&mut oracle, secret.len(), alphabet.size())?;
            report_attack(&alphabet, &secret, &oracle, &result)
        }
        AttackCommand::Sub(args) => {
            let (alphabet, secret, model) = load_model_attack(&args)?;
            let mut oracle = Oracle::new(alphabet.clone(), secret.clone())?;
            let result = run_substitution_attack(&mut oracle, &model)?;
            println!("M={}", model.m());
            report_attack(&alphabet, &secret, &oracle, &result)
        }
        AttackCommand::Indel(args) => {
            let (alphabet, secret, model) = load_model_attack(&args)?;
            let mut oracle = Oracle::new(alphabet.clone(), secret.clone())?;
            let run = run_indel_attack_detailed(&mut oracle, &model)?;
            println!("M={}", model.m());
            println!("deletions={}", join(&run.events.deletions));
            let insertions: Vec<String> = run
                .events
                .insertions
                .iter()
                .map(|(gap, content)| format!("{gap}:{}", alphabet.render(content)))
                .collect();
            println!("insertions={}", insertions.join(","));
            println!(
                "phase_queries={},{},{}",
                run.phases.deletion_search, run.phases.insertion_search, run.phases.extension
            );
            report_attack(&alphabet, &secret, &oracle, &run.result)
        }
    }
}

fn load_model_attack(args: &ModelAttackArgs) -> Result<(Alphabet, Sequence, VariationModel)> {
    let alphabet = args.alphabet.get()?;
    let secret = load_reference(&args.secret, &alphabet)?;
    let reference = load_reference(&args.reference, &alphabet)?;
    let model = VariationModel::parse(
        &read(&args.model)?,
        reference,
        &args.model.display().to_string(),
    )?;
    Ok((alphabet, secret, model))
}

fn report_attack(
    alphabet: &Alphabet,
    secret: &Sequence,
    oracle: &Oracle,
    result: &AttackResult,
) -> Result<()> {
    println!("recovered={}", alphabet.render(&result.recovered));
    println!("guesses={}", result.guesses_used);
    println!("bound={}", result.bound);
    println!("metered={}", oracle.queries_answered());
    let exact = result.recovered == *secret;
    println!("exact={exact}");
    if !exact {
        bail!("recovered sequence differs from the secret");
    }
    if oracle.queries_answered() != result.guesses_used {
        bail!(
            "attack counted {} guesses but the oracle answered {}",
            result.guesses_used,
            oracle.queries_answered()
        );
    }
    Ok(())
}

fn corpus(cmd: CorpusCommand) -> Result<()> {
    match cmd {
        CorpusCommand::Synth {
            reference,
            count,
            stats,
            seed,
            out,
            sites,
            min_spacing,
            alphabet,
        } => {
            let alphabet = alphabet.get()?;
            let reference = load_reference(&reference, &alphabet)?;
            let config = SynthConfig {
                site_pool: sites,
                min_spacing,
            };
            let synth =
                generate_synthetic_corpus_with(&reference, &alphabet, count, &stats, seed, config)?;
            let fasta = synth.corpus.to_fasta();
            match &out {
                Some(path) => write(path, &fasta)?,
                None => print!("{fasta}"),
            }
            eprintln!("sites={}", synth.sites.len());
            eprintln!("planted {}", stats_of(&synth.planted));
        }
        CorpusCommand::Stats {
            reference,
            corpus,
            input,
            alphabet,
        } => {
            let alphabet = alphabet.get()?;
            let reference = load_reference(&reference, &alphabet)?;
            let corpus = load_sequences(&corpus, &alphabet, input.options())?;
            println!("sequences={}", corpus.len());
            println!("{}", corpus_stats(&corpus, &reference)?);
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    if args.bin_width == 0 {
        bail!("--bin-width must be positive");
    }
    let alphabet = args.alphabet.get()?;
    let reference = load_reference(&args.reference, &alphabet)?;
    let corpus = load_sequences(&args.corpus, &alphabet, args.input.options())?;
    let model = VariationModel::parse(
        &read(&args.model)?,
        reference,
        &args.model.display().to_string(),
    )?;
    let report = simulate_attacks(&corpus, &model, args.kind)?;
    write(&args.out, &report.to_csv())?;
    write(
        &args.hist,
        &histogram_csv(&report.histogram(args.bin_width)),
    )?;
    println!("kind={}", report.kind);
    println!("skipped={}", report.skipped);
    match report.aggregates() {
        Some(agg) => print!("{}", agg.to_text()),
        None => println!("count=0"),
    }
    Ok(())
}

fn check(args: CheckArgs) -> Result<ExitCode> {
    let source = args.input.display().to_string();
    let inst = MastermindInstance::parse(&read(&args.input)?, &source)?;
    let alphabet = inst.alphabet();
    let ok = if let Some(path) = &args.witness {
        let text = read(path)?;
        let witness = alphabet
            .parse(text.trim())
            .with_context(|| format!("witness {}", path.display()))?;
        let ok = verify_witness(&witness, &inst)?;
        println!("satisfied={ok}");
        ok
    } else {
        let found = brute_force_satisfiable(&inst, args.limit)?;
        println!("satisfiable={}", found.is_some());
        if let Some(w) = &found {
            println!("witness={}", alphabet.render(w));
        }
        found.is_some()
    };
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn join<'a>(items: impl IntoIterator<Item = &'a usize>) -> String {
    items
        .into_iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
