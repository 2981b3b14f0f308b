use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlufs::dataset::{self, fetch::CACHE_ENV, FetchOptions, ManifestLabels};
use mlufs::harness::{self, ExperimentConfig, ExperimentReport, ReportFormat};
use mlufs::selectors::{self, Method, SelectorConfig};

#[derive(Parser)]
#[command(name = "mlufs", version, about = "Unsupervised feature selection under multi-label evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download, verify and parse every dataset of a manifest.
    Fetch {
        manifest: PathBuf,
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
        /// Use only the cache.
        #[arg(long)]
        offline: bool,
    },
    /// Run an experiment and write report.{json,csv,md}.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-label instability study on one configured dataset.
    Study { config: PathBuf, dataset: String },
    /// Render a saved JSON report.
    Report {
        report: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Rank the features of an ARFF file and print the top d.
    Select {
        dataset: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        d: Option<usize>,
        /// Labels are the last N attributes (default: MEKA `-C` header).
        #[arg(long, conflicts_with_all = ["first", "xml"])]
        last: Option<usize>,
        /// Labels are the first N attributes.
        #[arg(long, conflicts_with = "xml")]
        first: Option<usize>,
        /// MULAN label XML file.
        #[arg(long)]
        xml: Option<String>,
        #[arg(long, default_value_t = 5)]
        graph_k: usize,
        #[arg(long, default_value_t = 5)]
        clusters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Score file for `--method external`.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    Partial,
}

type CliResult = Result<Outcome, Box<dyn std::error::Error>>;

fn fetch(manifest: &Path, cache_dir: Option<PathBuf>, offline: bool) -> CliResult {
    let mut opts = FetchOptions::from_env(offline);
    if let Some(dir) = cache_dir {
        opts.cache_dir = dir;
    }
    let mut failed = 0;
    for o in dataset::fetch_manifest(manifest, &opts)? {
        match &o.result {
            Ok(ds) => println!(
                "ok\t{}\t{} instances, {} features, {} labels{}",
                o.name,
                ds.n_instances(),
                ds.n_features(),
                ds.n_labels(),
                if o.downloaded { "" } else { " (cached)" }
            ),
            Err(e) => {
                failed += 1;
                println!("failed\t{}\t{e}", o.name);
            }
        }
    }
    Ok(if failed > 0 { Outcome::Partial } else { Outcome::Done })
}

fn run(config: &Path, out: Option<PathBuf>) -> CliResult {
    let cfg = ExperimentConfig::load(config)?;
    let report = harness::run_experiment(&cfg)?;
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    for fmt in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
        println!("wrote {}", harness::emit_report(&report, fmt, &dir)?.display());
    }
    for f in &report.failures {
        eprintln!("failed: {} {}: {}", f.dataset, f.method.as_deref().unwrap_or(""), f.message);
    }
    Ok(if report.is_partial() { Outcome::Partial } else { Outcome::Done })
}

fn study(config: &Path, name: &str) -> CliResult {
    let cfg = ExperimentConfig::load(config)?;
    let (datasets, _) = harness::load_datasets(&cfg)?;
    let Some(ds) = datasets.iter().find(|d| d.name == name) else {
        let names: Vec<&str> = datasets.iter().map(|d| d.name.as_str()).collect();
        return Err(format!("dataset '{name}' not loaded; available: {}", names.join(", ")).into());
    };
    let r = harness::single_label_study(&cfg, ds)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(Outcome::Done)
}

fn report(path: &Path, format: &str) -> CliResult {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let r = ExperimentReport::from_json(&text)?;
    print!("{}", harness::render_report(&r, format.parse()?)?);
    Ok(if r.is_partial() { Outcome::Partial } else { Outcome::Done })
}

#[allow(clippy::too_many_arguments)]
fn select(
    path: &Path,
    method: &str,
    d: Option<usize>,
    labels: ManifestLabels,
    graph_k: usize,
    clusters: usize,
    seed: u64,
    scores: Option<PathBuf>,
) -> CliResult {
    let ds = dataset::load_arff_file(path, &labels)?;
    let (norm, _) = dataset::minmax_normalize(&ds, &ds)?;
    let mut cfg = SelectorConfig::new(method.parse::<Method>()?);
    cfg.graph_k = graph_k;
    cfg.mcfs_clusters = clusters;
    cfg.seed = seed;
    cfg.external_path = scores;
    let d = d.unwrap_or_else(|| selectors::default_d(ds.n_features())).min(ds.n_features());
    cfg.mcfs_cardinality = Some(d);
    let ranking = selectors::select(&norm.x, &cfg)?;
    for (pos, j) in ranking.top_d(d)?.into_iter().enumerate() {
        println!("{}\t{j}\t{}\t{}", pos + 1, ds.feature_names[j], ranking.scores[j]);
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fetch { manifest, cache_dir, offline } => fetch(&manifest, cache_dir, offline),
        Command::Run { config, out } => run(&config, out),
        Command::Study { config, dataset } => study(&config, &dataset),
        Command::Report { report: path, format } => report(&path, &format),
        Command::Select { dataset, method, d, last, first, xml, graph_k, clusters, seed, scores } => {
            let labels = match (last, first, xml) {
                (Some(n), _, _) => ManifestLabels::Last(n),
                (_, Some(n), _) => ManifestLabels::First(n),
                (_, _, Some(x)) => ManifestLabels::Xml(x),
                _ => ManifestLabels::Header(None),
            };
            select(&dataset, &method, d, labels, graph_k, clusters, seed, scores)
        }
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
