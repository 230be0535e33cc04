//! `tplay`: generate, inspect and split temporal playground corpora.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use temporal_playground::bot::{rollout, ScenarioHint, ScenarioKind};
use temporal_playground::config::{Config, Format};
use temporal_playground::dataset::{
    combined_split, file_checksum, generate_corpus, random_split, systematic_splits, Corpus, DatasetError,
    ResolvedSplit, SplitsFile, FORMAT_VERSION,
};
use temporal_playground::error::{BotError, WorldError};
use temporal_playground::grammar::{parse, vocabulary_file, vocabulary_hash, ConceptCategory, Grammar};
use temporal_playground::oracle::Oracle;
use temporal_playground::trace::Trace;

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tplay", version, about = "Temporal playground dataset tool")]
struct Cli {
    /// Configuration file (JSON, or TOML when the extension is .toml)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overrides the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Binary,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Grasp,
    Grow,
    Shake,
}

/// Where a single trace comes from.
#[derive(clap::Args, Debug)]
struct TraceSource {
    /// Trace JSON file as written by `describe --save-trace`
    #[arg(long, conflicts_with_all = ["corpus", "rollout"])]
    trace: Option<PathBuf>,

    /// Corpus file; pick the episode with --episode
    #[arg(long, requires = "episode")]
    corpus: Option<PathBuf>,

    #[arg(long)]
    episode: Option<usize>,

    /// Roll out a fresh episode from this seed
    #[arg(long)]
    rollout: Option<u64>,

    /// Scenario for --rollout
    #[arg(long, value_enum)]
    scenario: Option<KindArg>,

    /// Past-tense scenario for --rollout
    #[arg(long)]
    past: Option<bool>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a corpus, its coverage report and a manifest
    Generate {
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Print every true sentence of a trace, grouped by category
    Describe {
        #[command(flatten)]
        source: TraceSource,
        /// Write the trace to this file
        #[arg(long)]
        save_trace: Option<PathBuf>,
    },
    /// Evaluate one sentence on a trace and explain the verdict
    Eval {
        #[command(flatten)]
        source: TraceSource,
        #[arg(long)]
        sentence: String,
    },
    /// Write split files
    Split {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Only this split (random, a systematic split name, or systematic_combined)
        #[arg(long)]
        split: Option<String>,
    },
    /// Summarize a corpus
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// List the sentences of the universe
    Enumerate {
        #[arg(long)]
        category: Option<String>,
    },
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?
    } else {
        serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?
    };
    Ok(config)
}

fn load_trace(source: &TraceSource, config: &Config) -> Result<Trace> {
    match (&source.trace, &source.corpus, source.rollout) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing trace {}", path.display()))
        }
        (None, Some(path), _) => {
            let corpus = Corpus::load(path)?;
            let index = source.episode.expect("clap enforces --episode");
            let Some(record) = corpus.records.get(index) else {
                bail!("episode {index} out of range, corpus has {}", corpus.len());
            };
            Ok(record.trace(&corpus.header)?)
        }
        (None, None, Some(seed)) => {
            let hint = ScenarioHint {
                kind: source.scenario.map(|k| match k {
                    KindArg::Grasp => ScenarioKind::Grasp,
                    KindArg::Grow => ScenarioKind::Grow,
                    KindArg::Shake => ScenarioKind::Shake,
                }),
                past: source.past,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(rollout(&config.world, &config.bot, hint, &mut rng)?.trace)
        }
        (None, None, None) => bail!("one of --trace, --corpus or --rollout is required"),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool_version: &'static str,
    format_version: u32,
    vocab_hash: String,
    config: &'a Config,
    files: Vec<(String, String)>,
}

fn manifest(config: &Config, files: &[PathBuf]) -> Result<String> {
    let files = files
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, file_checksum(p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        format_version: FORMAT_VERSION,
        vocab_hash: vocabulary_hash(),
        config,
        files,
    };
    Ok(serde_json::to_string_pretty(&m)? + "\n")
}

fn generate(config: &Config, out: &Path) -> Result<()> {
    let generated = generate_corpus(config)?;
    let corpus_path = out.join("corpus.jsonl");
    let coverage_path = out.join("coverage.jsonl");
    let vocab_path = out.join("vocabulary.txt");
    generated.corpus.save(&corpus_path, config.format)?;
    generated.coverage.save(&generated.corpus.header.config, &coverage_path)?;
    write(&vocab_path, vocabulary_file().as_bytes())?;
    let files = [corpus_path, coverage_path, vocab_path];
    write(&out.join("manifest.json"), manifest(config, &files)?.as_bytes())?;
    let cov = &generated.coverage;
    println!("episodes {} ({} targeted)", cov.episodes, cov.targeted_accepted);
    for c in &cov.categories {
        println!(
            "{:<16} covered {:>4}/{:<4} with >= {} positives {:>4}",
            c.category.as_str(),
            c.covered,
            c.descriptions,
            cov.min_per_description,
            c.satisfied
        );
    }
    println!("shortfalls {}", cov.shortfalls.len());
    println!("wrote {}", out.display());
    Ok(())
}

fn describe(config: &Config, source: &TraceSource, save: Option<&Path>) -> Result<()> {
    let trace = load_trace(source, config)?;
    if let Some(path) = save {
        write(path, serde_json::to_string(&trace)?.as_bytes())?;
    }
    let grammar = Grammar::global();
    let ids = Oracle::new(config.oracle.clone()).describe(&trace);
    for cat in ConceptCategory::ALL {
        let range = grammar.category_range(cat);
        let sentences: Vec<String> =
            ids.iter().filter(|i| range.contains(i)).map(|&i| grammar.sentences()[i].to_string()).collect();
        println!("# {} ({})", cat.as_str(), sentences.len());
        for s in sentences {
            println!("{s}");
        }
    }
    Ok(())
}

fn eval(config: &Config, source: &TraceSource, sentence: &str) -> Result<()> {
    let ast = parse(sentence).with_context(|| format!("'{sentence}' is not in the grammar"))?;
    if Grammar::global().id_of(&ast).is_none() {
        bail!("'{sentence}' is not a description of the universe");
    }
    let trace = load_trace(source, config)?;
    let explanation = Oracle::new(config.oracle.clone()).explain(&trace, &ast)?;
    println!("{}", serde_json::to_string_pretty(&explanation)?);
    Ok(())
}

fn split(config: &Config, out: &Path, only: Option<&str>) -> Result<()> {
    let echo = serde_json::to_value(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.split.seed);
    let random = random_split(config.split.holdout_frac, &mut rng)?.resolve()?;
    let mut specs = systematic_splits();
    specs.push(combined_split(&specs));
    let systematic: Vec<ResolvedSplit> = specs.iter().map(|s| s.resolve()).collect::<Result<_, _>>()?;

    let mut files: Vec<(String, Vec<ResolvedSplit>)> = Vec::new();
    match only {
        None => {
            files.push(("splits_random.jsonl".into(), vec![random]));
            files.push(("splits_systematic.jsonl".into(), systematic));
        }
        Some(name) => {
            let found = std::iter::once(random).chain(systematic).find(|s| s.name() == name);
            let Some(s) = found else {
                let names: Vec<String> = std::iter::once("random".to_string())
                    .chain(specs.iter().map(|s| s.name.clone()))
                    .collect();
                bail!("unknown split '{name}', expected one of: {}", names.join(", "));
            };
            files.push((format!("splits_{name}.jsonl"), vec![s]));
        }
    }
    for (file, splits) in files {
        for s in &splits {
            if s.held_out.iter().any(|i| s.train.binary_search(i).is_ok()) {
                bail!("split {} is not disjoint", s.name());
            }
            println!("{:<24} held out {:>5}  train {:>5}", s.name(), s.held_out.len(), s.train.len());
        }
        let path = out.join(&file);
        SplitsFile::new(echo.clone(), splits).save(&path)?;
        println!("wrote {} ({})", path.display(), file_checksum(&path)?);
    }
    Ok(())
}

fn stats(path: &Path) -> Result<()> {
    let corpus = Corpus::load(path)?;
    let stats = corpus.stats()?;
    let report = serde_json::json!({
        "corpus": path.display().to_string(),
        "checksum": file_checksum(path)?,
        "config": corpus.header.config,
        "stats": stats,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn enumerate(category: Option<&str>) -> Result<()> {
    let grammar = Grammar::global();
    let sentences = match category {
        None => grammar.sentences(),
        Some(name) => {
            let Some(cat) = ConceptCategory::from_name(name) else {
                bail!("unknown category '{name}', expected basic, spatial, temporal or spatio_temporal");
            };
            grammar.enumerate(cat)
        }
    };
    for s in sentences {
        println!("{s}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match cli.command {
        Command::Generate { episodes, out, format } => {
            if let Some(n) = episodes {
                config.episodes = n;
            }
            if let Some(f) = format {
                config.format = match f {
                    FormatArg::Text => Format::Text,
                    FormatArg::Binary => Format::Binary,
                };
            }
            generate(&config, &out)
        }
        Command::Describe { source, save_trace } => describe(&config, &source, save_trace.as_deref()),
        Command::Eval { source, sentence } => eval(&config, &source, &sentence),
        Command::Split { out, split: only } => {
            if let Some(seed) = cli.seed {
                config.split.seed = seed;
            }
            split(&config, &out, only.as_deref())
        }
        Command::Stats { corpus } => stats(&corpus),
        Command::Enumerate { category } => enumerate(category.as_deref()),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<DatasetError>() {
            return match e {
                DatasetError::Bot(_) => EXIT_INFEASIBLE,
                DatasetError::InvalidParameter(_) | DatasetError::Grammar(_) => EXIT_USAGE,
                _ => EXIT_IO,
            };
        }
        if cause.is::<BotError>() || cause.is::<WorldError>() {
            return EXIT_INFEASIBLE;
        }
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
