//! Command-line front end: ingestion, threading, linking, evaluation and the
//! end-to-end pipeline, with deterministic JSON outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use ccdp_core::config::ConfigFile;
use ccdp_core::corpus::{
    load_corpus_json, parse_eml, parse_mbox, save_corpus_json, Corpus, DuplicatePolicy, Message,
    MessageKind,
};
use ccdp_core::ect::build_ects;
use ccdp_core::eval::{load_gold_standard, EvalReport, StratumStats};
use ccdp_core::linker::to_dot;
use ccdp_core::manifest::{digest_file, InputDigest, RunManifest};
use ccdp_core::pipeline::{
    explain_pair, run_pipeline, CcdpsReport, EvalReportFile, SemanticEngine, ThreadsReport,
};
use ccdp_core::proximity::ProximityConfig;
use ccdp_core::semantic::load_word_vectors;
use ccdp_core::CcdpError;

#[derive(Parser)]
#[command(name = "ccdp", version, about = "Thread reconstruction and collaborative conversation linking")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Key-value config file with proximity parameters
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Word-vector file enabling the soft-cosine provider; omitted selects
    /// exact cosine
    #[arg(long, global = true)]
    vectors: Option<PathBuf>,
    /// GP link threshold in [0,1]
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Time-proximity constant k, in hours
    #[arg(long = "k-hours", global = true)]
    k_hours: Option<f64>,
    /// GP weights as "a,b,c"
    #[arg(long, global = true)]
    weights: Option<String>,
    /// Only enumerate pairs closer in time than this many hours
    #[arg(long = "horizon-hours", global = true)]
    horizon_hours: Option<f64>,
    /// Write a Graphviz graph of ECTs and links to this file
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Directory for JSON reports (pipeline)
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse EML files, directories and mbox files into a corpus JSON
    Ingest {
        /// Input files or directories
        inputs: Vec<PathBuf>,
        /// Output corpus file
        #[arg(long, default_value = "corpus.json")]
        out: PathBuf,
    },
    /// Print the header-based conversation threads (ECTs) as JSON
    Threads { corpus: PathBuf },
    /// Detect collaborative links and print CCDPs as JSON
    Link { corpus: PathBuf },
    /// Compare calculated proximities with a gold-standard CSV
    Evaluate {
        corpus: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Run threading, linking and (optionally) evaluation, writing reports
    Pipeline {
        corpus: PathBuf,
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Print the full proximity breakdown for one message pair
    Explain {
        corpus: PathBuf,
        msg_a: String,
        msg_b: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 for input problems, 1 for anything unexpected.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CcdpError>().is_some() || err.downcast_ref::<std::io::Error>().is_some()
    {
        2
    } else if let Some(msg) = err.downcast_ref::<String>() {
        if msg.starts_with("input:") {
            2
        } else {
            1
        }
    } else {
        2
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = resolve_config(&cli.opts)?;
    match cli.command {
        Command::Ingest { inputs, out } => cmd_ingest(&inputs, &out),
        Command::Threads { corpus } => cmd_threads(&corpus),
        Command::Link { corpus } => cmd_link(&corpus, &cfg, &cli.opts),
        Command::Evaluate { corpus, gold } => cmd_evaluate(&corpus, &gold, &cfg, &cli.opts),
        Command::Pipeline { corpus, gold } => cmd_pipeline(&corpus, gold.as_deref(), &cfg, &cli.opts),
        Command::Explain {
            corpus,
            msg_a,
            msg_b,
        } => cmd_explain(&corpus, &msg_a, &msg_b, &cfg, &cli.opts),
    }
}

/// Defaults <- config file <- CLI flags.
fn resolve_config(opts: &GlobalOpts) -> anyhow::Result<ProximityConfig> {
    let file = match &opts.config {
        Some(path) => ConfigFile::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ConfigFile::default(),
    };
    let mut cfg = file.resolve()?;
    if let Some(t) = opts.threshold {
        cfg.threshold = t;
    }
    if let Some(k) = opts.k_hours {
        cfg.k_hours = k;
    }
    if let Some(h) = opts.horizon_hours {
        cfg.horizon_hours = Some(h);
    }
    if let Some(w) = &opts.weights {
        let parts: Vec<f64> = w
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CcdpError::InvalidConfig(format!("--weights: {e}")))?;
        let [a, b, c] = parts[..] else {
            return Err(CcdpError::InvalidConfig("--weights expects \"a,b,c\"".into()).into());
        };
        (cfg.a, cfg.b, cfg.c) = (a, b, c);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn make_engine(opts: &GlobalOpts) -> anyhow::Result<SemanticEngine> {
    match &opts.vectors {
        Some(path) => {
            let (model, warnings) = load_word_vectors(path)
                .with_context(|| format!("loading {}", path.display()))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(SemanticEngine::soft_cosine(model))
        }
        None => Ok(SemanticEngine::exact_cosine()),
    }
}

fn load_corpus(path: &Path) -> anyhow::Result<Corpus> {
    let (corpus, warnings) =
        load_corpus_json(path).with_context(|| format!("loading {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(corpus)
}

fn manifest_for(
    cfg: &ProximityConfig,
    engine: &SemanticEngine,
    opts: &GlobalOpts,
    corpus_path: &Path,
    gold_path: Option<&Path>,
) -> anyhow::Result<RunManifest> {
    let mut inputs: Vec<InputDigest> = vec![digest_file(corpus_path)?];
    for extra in [opts.config.as_deref(), opts.vectors.as_deref(), gold_path]
        .into_iter()
        .flatten()
    {
        inputs.push(digest_file(extra)?);
    }
    Ok(RunManifest::new(cfg, engine.provider_name(), inputs))
}

fn cmd_ingest(inputs: &[PathBuf], out: &Path) -> anyhow::Result<()> {
    if inputs.is_empty() {
        return Err(CcdpError::InvalidConfig("no inputs given".into()).into());
    }
    let mut messages: Vec<Message> = Vec::new();
    let mut files: Vec<PathBuf> = Vec::new();
    for input in inputs {
        collect_files(input, &mut files)?;
    }
    files.sort();
    for file in &files {
        let data = std::fs::read(file)?;
        if data.starts_with(b"From ") || file.extension().is_some_and(|e| e == "mbox") {
            let (msgs, warnings) = parse_mbox(&data[..])?;
            for w in warnings {
                eprintln!("warning: {}: {w}", file.display());
            }
            messages.extend(msgs);
        } else {
            match parse_eml(&data) {
                Ok(msg) => messages.push(msg),
                Err(e) => eprintln!("warning: {}: {e}", file.display()),
            }
        }
    }
    let (corpus, warnings) = Corpus::build(messages, DuplicatePolicy::SkipWithWarning)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if corpus.is_empty() {
        return Err(anyhow!(CcdpError::InvalidConfig(
            "no parseable messages in inputs".into()
        )));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for m in corpus.messages() {
        let kind = match m.kind {
            MessageKind::Email => "email",
            MessageKind::Meeting => "meeting",
            MessageKind::MeetingNotification => "meeting_notification",
        };
        *counts.entry(kind).or_insert(0) += 1;
    }
    save_corpus_json(&corpus, out)?;
    println!("wrote {} messages to {}", corpus.len(), out.display());
    for (kind, n) in counts {
        println!("  {kind}: {n}");
    }
    Ok(())
}

fn collect_files(input: &Path, files: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    if input.is_dir() {
        for entry in std::fs::read_dir(input)? {
            collect_files(&entry?.path(), files)?;
        }
    } else if input.is_file() {
        files.push(input.to_path_buf());
    } else {
        return Err(anyhow!(CcdpError::InvalidConfig(format!(
            "input {} does not exist",
            input.display()
        ))));
    }
    Ok(())
}

fn cmd_threads(corpus_path: &Path) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let ects = build_ects(&corpus);
    println!("{}", serde_json::to_string_pretty(&ects)?);
    Ok(())
}

fn cmd_link(corpus_path: &Path, cfg: &ProximityConfig, opts: &GlobalOpts) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let mut engine = make_engine(opts)?;
    let manifest = manifest_for(cfg, &engine, opts, corpus_path, None)?;
    let output = run_pipeline(&corpus, cfg, &mut engine, None)?;
    if let Some(dot_path) = &opts.dot {
        std::fs::write(dot_path, to_dot(&output.ects, &output.links))?;
    }
    let report = CcdpsReport {
        manifest,
        ccdps: output.ccdps,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_evaluate(
    corpus_path: &Path,
    gold_path: &Path,
    cfg: &ProximityConfig,
    opts: &GlobalOpts,
) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let gold = load_gold_standard(gold_path)?;
    let mut engine = make_engine(opts)?;
    let manifest = manifest_for(cfg, &engine, opts, corpus_path, Some(gold_path))?;
    let output = run_pipeline(&corpus, cfg, &mut engine, Some(&gold))?;
    let report = output.eval.expect("gold provided");
    print_eval_tables(&report);
    let file = EvalReportFile {
        manifest,
        report,
    };
    println!("{}", serde_json::to_string_pretty(&file)?);
    Ok(())
}

fn cmd_pipeline(
    corpus_path: &Path,
    gold_path: Option<&Path>,
    cfg: &ProximityConfig,
    opts: &GlobalOpts,
) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let gold = gold_path.map(load_gold_standard).transpose()?;
    let mut engine = make_engine(opts)?;
    let manifest = manifest_for(cfg, &engine, opts, corpus_path, gold_path)?;
    let output = run_pipeline(&corpus, cfg, &mut engine, gold.as_ref())?;

    let dir = opts.json.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    write_json(
        &dir.join("threads.json"),
        &ThreadsReport {
            manifest: manifest.clone(),
            ects: output.ects.clone(),
        },
    )?;
    write_json(
        &dir.join("ccdps.json"),
        &CcdpsReport {
            manifest: manifest.clone(),
            ccdps: output.ccdps.clone(),
        },
    )?;
    if let Some(eval) = &output.eval {
        write_json(
            &dir.join("eval.json"),
            &EvalReportFile {
                manifest: manifest.clone(),
                report: eval.clone(),
            },
        )?;
    }
    if let Some(dot_path) = &opts.dot {
        std::fs::write(dot_path, to_dot(&output.ects, &output.links))?;
    }
    println!(
        "{} messages, {} threads, {} links, {} collaborative conversations",
        corpus.len(),
        output.ects.len(),
        output.links.len(),
        output.ccdps.len()
    );
    if let Some(eval) = &output.eval {
        print_eval_tables(eval);
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut data = serde_json::to_string_pretty(value)?;
    data.push('\n');
    std::fs::write(path, data)?;
    Ok(())
}

fn cmd_explain(
    corpus_path: &Path,
    msg_a: &str,
    msg_b: &str,
    cfg: &ProximityConfig,
    opts: &GlobalOpts,
) -> anyhow::Result<()> {
    let corpus = load_corpus(corpus_path)?;
    let mut engine = make_engine(opts)?;
    if cfg.use_idf {
        engine.fit_idf(&corpus);
    }
    let breakdown = explain_pair(&corpus, msg_a, msg_b, cfg, &engine.context())?;
    println!("{}", serde_json::to_string_pretty(&breakdown)?);
    Ok(())
}

fn print_stratum(label: &str, s: &StratumStats) {
    println!("{label} ({} pairs)", s.pair_count);
    println!("{:<32}{:>10}{:>10}", "", "GS", "CP");
    println!("{:<32}{:>10.3}{:>10.3}", "Max =", s.gold.max, s.calculated.max);
    println!("{:<32}{:>10.3}{:>10.3}", "Min =", s.gold.min, s.calculated.min);
    println!(
        "{:<32}{:>10.3}{:>10.3}",
        "Average =", s.gold.average, s.calculated.average
    );
    println!(
        "{:<32}{:>20.3}",
        "Average Absolute Deviation =", s.average_absolute_deviation
    );
    println!();
}

fn print_eval_tables(report: &EvalReport) {
    print_stratum("All pairs", &report.all);
    if let Some(s) = &report.same_ect {
        print_stratum("Same ECT", s);
    }
    if let Some(s) = &report.cross_ect {
        print_stratum("Different ECTs", s);
    }
    println!(
        "Compensatory coefficient = {:.4}",
        report.compensatory_coefficient
    );
    println!(
        "Scaled GS: max {:.3}, min {:.3}, average {:.3}; AAD vs CP = {:.3}",
        report.scaled_gold.max,
        report.scaled_gold.min,
        report.scaled_gold.average,
        report.scaled_average_absolute_deviation
    );
}
