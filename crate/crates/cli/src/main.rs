use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use regexgen_core::dataset::{
    generate_synthetic, load_annotated, load_corpus, synthetic_documents, to_examples,
    write_annotated, SyntheticSpec,
};
use regexgen_core::evaluation::{run_extraction, score, Extractor};
use regexgen_core::outlier::DEFAULT_FLATNESS_EPS;
use regexgen_core::report::{artifact_records, load_artifacts, write_artifacts, Diagnostics};
use regexgen_core::slot::SlotOptions;
use regexgen_core::{abstraction, generate, Execution, GenerateOptions, MatchMode};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "regexgen", version, about = "Learn regular expressions from noisy examples")]
struct Cli {
    /// Worker threads for the parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a corpus, drop outlier clusters and emit one regex per cluster.
    Generate {
        corpus: PathBuf,
        /// Keep exactly this many clusters instead of the detected knee.
        #[arg(long)]
        knee_override: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_FLATNESS_EPS)]
        flatness_eps: f64,
        /// Emit non-greedy quantifiers.
        #[arg(long)]
        lazy: bool,
        /// Render empty-permitting slots as {0,max} instead of *.
        #[arg(long)]
        bounded_star: bool,
        /// Artifact file (JSON lines); stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Cluster table, cumulative distribution and knee decision (JSON).
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Score an artifact file against an annotated dataset.
    Evaluate {
        artifacts: PathBuf,
        dataset: PathBuf,
        /// Also write the report as JSON.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the abstract shape of a string.
    Abstract { text: String },
    /// Generate a synthetic corpus from a JSON spec file.
    Synth {
        spec: PathBuf,
        /// Plain corpus, one example per line.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Annotated documents (JSON lines) built around the same examples.
        #[arg(long)]
        documents: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_generate(
    exec: Execution,
    corpus: &Path,
    opts: GenerateOptions,
    output: Option<&Path>,
    diagnostics: Option<&Path>,
) -> anyhow::Result<()> {
    let examples = load_corpus(corpus)?;
    let opts = GenerateOptions {
        execution: exec,
        ..opts
    };
    let out = generate(&examples, &opts)?;
    let records = artifact_records(&out);

    match output {
        Some(p) => {
            let mut w = create(p)?;
            write_artifacts(&mut w, &records)?;
            w.flush()?;
        }
        None => write_artifacts(io::stdout().lock(), &records)?,
    }
    if let Some(p) = diagnostics {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &Diagnostics::from_output(&out, opts.flatness_eps))?;
        w.write_all(b"\n")?;
        w.flush()?;
    }

    eprintln!(
        "{} examples, {} clusters, knee at rank {}{}",
        out.table.total(),
        out.table.len(),
        out.knee.knee_rank,
        if out.knee.overridden { " (override)" } else { "" }
    );
    for r in &records {
        eprintln!("  kept     {:<16} {:>6}  {}", r.metaparam, r.members, r.regex);
    }
    for mp in &out.knee.filtered {
        let freq = out.table.get(mp).map_or(0, |e| e.frequency);
        eprintln!("  filtered {:<16} {:>6}", mp.as_str(), freq);
    }
    Ok(())
}

fn cmd_evaluate(
    exec: Execution,
    artifacts: &Path,
    dataset: &Path,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let records = load_artifacts(artifacts)?;
    let docs = load_annotated(dataset)?;
    let extractor = Extractor::new(records.iter().map(|r| r.regex.as_str()))?;
    let report = score(&run_extraction(&extractor, &docs, exec));

    println!("documents      {}", report.documents);
    println!("extractions    {}", report.extractions);
    println!("correct        {}", report.correct);
    println!("positives      {}", report.positives);
    println!("precision      {:.4}", report.precision);
    println!("recall         {:.4}", report.recall);
    println!("f-measure      {:.4}", report.f_measure);
    if let Some(np) = report.noisy_precision {
        println!("noisy-prec     {np:.4}");
    }
    if let Some(p) = output {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &report)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_abstract(text: &str) -> anyhow::Result<()> {
    if text.is_empty() {
        return Err(UsageError("abstract: argument must be a non-empty string".into()).into());
    }
    println!("{}", abstraction::transform_and_compress(text)?);
    Ok(())
}

fn cmd_synth(spec: &Path, output: Option<&Path>, documents: Option<&Path>) -> anyhow::Result<()> {
    let spec = SyntheticSpec::load(spec)?;
    let corpus = generate_synthetic(&spec)?;
    match output {
        Some(p) => regexgen_core::dataset::save_corpus(p, &to_examples(&corpus)?)?,
        None if documents.is_none() => {
            let mut out = io::stdout().lock();
            for s in &corpus {
                writeln!(out, "{}", s.text)?;
            }
        }
        None => {}
    }
    if let Some(p) = documents {
        let mut w = create(p)?;
        write_annotated(&mut w, &synthetic_documents(&corpus, spec.seed))?;
        w.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let command = cli.command;
    let job = move || match command {
        Command::Generate {
            corpus,
            knee_override,
            flatness_eps,
            lazy,
            bounded_star,
            output,
            diagnostics,
        } => {
            let opts = GenerateOptions {
                knee_override,
                flatness_eps,
                slot: SlotOptions {
                    mode: if lazy { MatchMode::Lazy } else { MatchMode::Greedy },
                    bounded_star,
                },
                execution: exec,
            };
            cmd_generate(exec, &corpus, opts, output.as_deref(), diagnostics.as_deref())
        }
        Command::Evaluate {
            artifacts,
            dataset,
            output,
        } => cmd_evaluate(exec, &artifacts, &dataset, output.as_deref()),
        Command::Abstract { text } => cmd_abstract(&text),
        Command::Synth {
            spec,
            output,
            documents,
        } => cmd_synth(&spec, output.as_deref(), documents.as_deref()),
    };
    match cli.threads {
        Some(0) => Err(UsageError("--threads must be at least 1".into()).into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot start thread pool")?
            .install(job),
        None => job(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<regexgen_core::Error>() {
        Some(e) if e.is_internal() => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
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
            log::debug!("{e:?}");
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
