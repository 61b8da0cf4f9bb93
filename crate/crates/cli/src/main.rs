//! `hybrid-ir`: index images embedded in HTML documents by color class and
//! surrounding text, then search them with cosine-ranked term weighting.
//!
//! Results and reports go to stdout as TSV; diagnostics go to stderr.
//! Exit codes: 0 success, 1 domain failure (nothing indexed, empty index,
//! undecodable image, malformed judgments), 2 I/O failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hybrid_ir::fetch::FetchConfig;
use hybrid_ir::pipeline::{build_reference_set, index_documents, IndexingOptions};
use hybrid_ir::store;
use hybrid_ir_core::color::{argmin_label, build_histogram, classify, decode_ppm};
use hybrid_ir_core::eval::{run_comparison, RelevanceJudgments};
use hybrid_ir_core::index::Index;
use hybrid_ir_core::query::{search, SearchParams};
use hybrid_ir_core::text::StopWords;
use hybrid_ir_core::weight::{LocationWeightTable, WeightScheme};

const EXIT_DOMAIN: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(
    name = "hybrid-ir",
    version,
    about = "Hybrid text+color retrieval of web images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a labeled reference set from a directory of class subdirectories
    BuildReference(BuildReferenceArgs),
    /// Fetch, classify, and index every image of the listed documents
    Index(IndexArgs),
    /// Rank indexed images against a text query
    Search(SearchArgs),
    /// Classify one PPM image against a reference set
    Classify(ClassifyArgs),
    /// Compare weighting schemes against relevance judgments
    Eval(EvalArgs),
}

/// Data root for defaults: `$HYBRID_IR_HOME`, else the current directory.
fn data_root() -> PathBuf {
    std::env::var_os("HYBRID_IR_HOME")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn default_index_dir() -> PathBuf {
    data_root().join("index")
}

fn default_refset() -> PathBuf {
    data_root().join("refset.tsv")
}

#[derive(Args)]
struct BuildReferenceArgs {
    /// Directory holding one subdirectory of PPM images per class
    images_root: PathBuf,
    /// Where to write the reference set (default: <data root>/refset.tsv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    /// Text file listing document paths/URLs, one per line
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    index_dir: Option<PathBuf>,
    #[arg(long)]
    refset: Option<PathBuf>,
    /// Stop-word file (default: built-in English list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Concurrent document workers
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Size cap per fetched resource, in bytes
    #[arg(long, default_value_t = hybrid_ir::fetch::DEFAULT_MAX_BYTES)]
    max_bytes: u64,
}

#[derive(Args)]
struct SearchArgs {
    /// Query text
    query: String,
    #[arg(long)]
    index_dir: Option<PathBuf>,
    /// Weighting scheme: boolean | tf | idf | tf-idf | vtf-idf
    #[arg(long, default_value = "vtf-idf")]
    scheme: String,
    /// Result cutoff
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Weight table preset (paper-multiplicative | paper-additive | flat) or file
    #[arg(long, default_value = "paper-multiplicative")]
    weights: String,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Keep zero-score results instead of suppressing them
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// PPM image to classify (not needed with --stub-distances)
    image: Option<PathBuf>,
    #[arg(long)]
    refset: Option<PathBuf>,
    /// Skip histogram computation and rank a precomputed table of
    /// `label<TAB>average-distance` lines
    #[arg(long)]
    stub_distances: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    index_dir: Option<PathBuf>,
    /// Judgments file: `query<TAB>comma-separated record ids`
    #[arg(long)]
    judgments: PathBuf,
    /// Comma-separated scheme list (default: all five)
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value = "paper-multiplicative")]
    weights: String,
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::BuildReference(args) => cmd_build_reference(args),
        Command::Index(args) => cmd_index(args),
        Command::Search(args) => cmd_search(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("hybrid-ir: {message}");
    ExitCode::from(code)
}

fn load_stopwords(path: &Option<PathBuf>) -> Result<StopWords, ExitCode> {
    match path {
        None => Ok(StopWords::default_english()),
        Some(p) => store::load_stopwords(p).map_err(|e| fail(EXIT_IO, e)),
    }
}

fn load_weight_table(spec: &str) -> Result<LocationWeightTable, ExitCode> {
    store::resolve_weight_table(spec).map_err(|e| match e {
        store::WeightTableSpecError::Io { .. } => fail(EXIT_IO, e),
        store::WeightTableSpecError::Parse(_) => fail(EXIT_DOMAIN, e),
    })
}

fn load_index_dir(path: &Option<PathBuf>) -> Result<Index, ExitCode> {
    let dir = path.clone().unwrap_or_else(default_index_dir);
    store::load_index(&dir).map_err(|e| fail(EXIT_IO, e))
}

fn cmd_build_reference(args: BuildReferenceArgs) -> ExitCode {
    let built = match build_reference_set(&args.images_root) {
        Ok(built) => built,
        Err(e @ hybrid_ir::pipeline::BuildRefError::Empty(_)) => return fail(EXIT_DOMAIN, e),
        Err(e) => return fail(EXIT_IO, e),
    };
    for warning in &built.warnings {
        eprintln!("hybrid-ir: skipped {warning}");
    }
    let out = args.out.unwrap_or_else(default_refset);
    if let Err(e) = store::save_reference_set(&built.set, &out) {
        return fail(EXIT_IO, e);
    }
    for (label, histograms) in built.set.classes() {
        println!("class\t{label}\t{}", histograms.len());
    }
    println!("classes\t{}", built.set.class_count());
    ExitCode::SUCCESS
}

fn cmd_index(args: IndexArgs) -> ExitCode {
    let refset_path = args.refset.clone().unwrap_or_else(default_refset);
    let refs = match store::load_reference_set(&refset_path) {
        Ok(refs) => refs,
        Err(e) => return fail(EXIT_IO, e),
    };
    let stopwords = match load_stopwords(&args.stopwords) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let inputs: Vec<String> = match fs::read_to_string(&args.input) {
        Ok(text) => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
        Err(e) => return fail(EXIT_IO, format!("{}: {e}", args.input.display())),
    };

    let options = IndexingOptions {
        fetch: FetchConfig {
            max_bytes: args.max_bytes,
        },
        workers: args.workers.max(1),
    };
    let mut index = Index::new();
    let report = index_documents(&inputs, &refs, &stopwords, &options, &mut index);

    for failure in &report.failures {
        eprintln!("hybrid-ir: skipped {failure}");
    }
    for image in &report.indexed {
        println!("{}\t{}\t{}", image.id, image.filename, image.class_label);
    }
    eprintln!(
        "hybrid-ir: {} documents, {} images indexed, {} skipped",
        report.documents_processed,
        report.indexed.len(),
        report.failures.len()
    );

    if report.indexed.is_empty() {
        return fail(EXIT_DOMAIN, "no images were indexed");
    }
    let dir = args.index_dir.unwrap_or_else(default_index_dir);
    match store::save_index(&index, &dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_IO, e),
    }
}

fn cmd_search(args: SearchArgs) -> ExitCode {
    let scheme: WeightScheme = match args.scheme.parse() {
        Ok(s) => s,
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    let table = match load_weight_table(&args.weights) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let stopwords = match load_stopwords(&args.stopwords) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let index = match load_index_dir(&args.index_dir) {
        Ok(i) => i,
        Err(code) => return code,
    };
    if index.is_empty() {
        return fail(EXIT_DOMAIN, "index is empty");
    }

    let params = SearchParams {
        scheme,
        table,
        k: args.k,
        include_zero_scores: args.all,
    };
    let hits = match search(&index, &args.query, &stopwords, &params) {
        Ok(hits) => hits,
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    for hit in hits {
        let record = index.record(hit.record).expect("hit comes from this index");
        println!(
            "{}\t{:.6}\t{}\t{}",
            hit.rank, hit.score, record.image_uri, record.class_label
        );
    }
    ExitCode::SUCCESS
}

fn cmd_classify(args: ClassifyArgs) -> ExitCode {
    let averages: BTreeMap<String, f64> = if let Some(stub) = &args.stub_distances {
        match load_stub_distances(stub) {
            Ok(a) => a,
            Err(code) => return code,
        }
    } else {
        let Some(image_path) = &args.image else {
            return fail(
                EXIT_DOMAIN,
                "an image path is required without --stub-distances",
            );
        };
        let refset_path = args.refset.clone().unwrap_or_else(default_refset);
        let refs = match store::load_reference_set(&refset_path) {
            Ok(refs) => refs,
            Err(e) => return fail(EXIT_IO, e),
        };
        let bytes = match fs::read(image_path) {
            Ok(b) => b,
            Err(e) => return fail(EXIT_IO, format!("{}: {e}", image_path.display())),
        };
        let pixels = match decode_ppm(&bytes) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_DOMAIN, format!("{}: {e}", image_path.display())),
        };
        match classify(&build_histogram(&pixels), &refs) {
            Ok(result) => result.average_distances,
            Err(e) => return fail(EXIT_DOMAIN, e),
        }
    };

    for (label, avg) in &averages {
        println!("{label}\t{avg:.2}");
    }
    match argmin_label(&averages) {
        Some(winner) => {
            println!("class-label\t{winner}");
            ExitCode::SUCCESS
        }
        None => fail(EXIT_DOMAIN, "no classes to rank"),
    }
}

fn load_stub_distances(path: &Path) -> Result<BTreeMap<String, f64>, ExitCode> {
    let text =
        fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
    let mut averages = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = line
            .split_once('\t')
            .and_then(|(label, avg)| Some((label, avg.trim().parse::<f64>().ok()?)));
        match parsed {
            Some((label, avg)) if avg.is_finite() => {
                averages.insert(label.to_string(), avg);
            }
            _ => {
                return Err(fail(
                    EXIT_DOMAIN,
                    format!("bad stub distance line {line:?}"),
                ))
            }
        }
    }
    if averages.is_empty() {
        return Err(fail(EXIT_DOMAIN, "stub distance table is empty"));
    }
    Ok(averages)
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let schemes: Vec<WeightScheme> = match &args.schemes {
        None => WeightScheme::ALL.to_vec(),
        Some(list) => {
            let mut parsed = Vec::new();
            for name in list.split(',') {
                match name.trim().parse() {
                    Ok(s) => parsed.push(s),
                    Err(e) => return fail(EXIT_DOMAIN, e),
                }
            }
            parsed
        }
    };
    let table = match load_weight_table(&args.weights) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let stopwords = match load_stopwords(&args.stopwords) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let judgments_text = match fs::read_to_string(&args.judgments) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_IO, format!("{}: {e}", args.judgments.display())),
    };
    let judgments = match RelevanceJudgments::parse(&judgments_text) {
        Ok(j) => j,
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    let index = match load_index_dir(&args.index_dir) {
        Ok(i) => i,
        Err(code) => return code,
    };

    let results = match run_comparison(&index, &judgments, &schemes, &table, args.k, &stopwords) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    for result in &results {
        println!(
            "summary\t{}\t{}\t{:.6}\t{:.6}",
            result.scheme, result.k, result.mean_precision, result.mean_recall
        );
        for outcome in &result.per_query {
            println!(
                "query\t{}\t{}\t{:.6}\t{:.6}",
                result.scheme, outcome.query, outcome.precision, outcome.recall
            );
        }
    }
    ExitCode::SUCCESS
}
