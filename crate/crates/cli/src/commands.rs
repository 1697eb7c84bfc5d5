use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vicinity_bench::{run_all, ExperimentConfig};
use vicinity_core::{inspect_index, ParseOptions, Search};

use crate::error::CliError;
use crate::index::{open, read_graph, AnyOracle, QuerySpec};
use crate::service::{serve, AppState};

#[derive(Debug, Parser)]
#[command(name = "vicinity", version, about = "Exact shortest-path distance oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from an edge list and print build statistics.
    Build(BuildArgs),
    /// Answer one query against a saved index.
    Query(QueryArgs),
    /// Run the experiment suite and write CSV reports.
    Bench(BenchArgs),
    /// Print an index header and size breakdown.
    Stats(StatsArgs),
    /// Serve queries over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Whitespace-separated edge list (`u v` or `u v w`).
    #[arg(long)]
    pub graph: PathBuf,
    /// Require every edge to be listed in both directions.
    #[arg(long)]
    pub symmetric_input: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: GraphArgs,
    /// Read a third column as edge weights.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Build threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Use these node labels as landmarks instead of sampling.
    #[arg(long, value_delimiter = ',')]
    pub landmarks: Option<Vec<u64>>,
    /// Output index file.
    #[arg(long)]
    pub index: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Bfs,
    BidirectionalBfs,
    Dijkstra,
}

impl From<SearchArg> for Search {
    fn from(s: SearchArg) -> Self {
        match s {
            SearchArg::Bfs => Search::Bfs,
            SearchArg::BidirectionalBfs => Search::BidirectionalBfs,
            SearchArg::Dijkstra => Search::Dijkstra,
        }
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[command(flatten)]
    pub input: GraphArgs,
    /// Source node label.
    #[arg(short, long)]
    pub source: u64,
    /// Target node label.
    #[arg(short, long)]
    pub target: u64,
    /// Include the path in the output.
    #[arg(long)]
    pub path: bool,
    /// Resolve NOT_FOUND with an exact search.
    #[arg(long)]
    pub fallback: bool,
    /// Search used by --fallback; defaults to bidirectional BFS, or
    /// Dijkstra for weighted indexes.
    #[arg(long, value_enum)]
    pub search: Option<SearchArg>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for the CSV files and metadata.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub index: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[command(flatten)]
    pub input: GraphArgs,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Request-handling threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

pub fn default_search(oracle: &AnyOracle) -> Search {
    match oracle {
        AnyOracle::Hops(_) => Search::BidirectionalBfs,
        AnyOracle::Real(_) => Search::Dijkstra,
    }
}

fn require_file(path: &Path) -> Result<(), CliError> {
    open(path).map(drop)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Runs one subcommand and returns what it prints on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Build(args) => build(args),
        Command::Query(args) => query(args),
        Command::Bench(args) => bench(args),
        Command::Stats(args) => Ok(to_json(&inspect_index(std::io::BufReader::new(open(&args.index)?))?)),
        Command::Serve(args) => serve_cmd(args),
    }
}

fn build(args: BuildArgs) -> Result<String, CliError> {
    if !(args.alpha.is_finite() && args.alpha > 0.0) {
        return Err(CliError::Config(format!("alpha must be positive, got {}", args.alpha)));
    }
    require_file(&args.input.graph)?;
    if let Some(dir) = args.index.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(CliError::Config(format!(
                "output directory {} does not exist",
                dir.display()
            )));
        }
    }
    let options = ParseOptions {
        treat_as_undirected: !args.input.symmetric_input,
        weighted: args.weighted,
    };
    let graph = read_graph(&args.input.graph, options)?;
    let oracle = AnyOracle::build(graph, args.alpha, args.seed, args.workers, args.landmarks.as_deref())?;
    let bytes = oracle.save(&args.index)?;

    #[derive(Serialize)]
    struct Report<'a> {
        index: &'a Path,
        index_bytes: u64,
        #[serde(flatten)]
        stats: &'a vicinity_core::BuildStats,
    }
    Ok(to_json(&Report {
        index: &args.index,
        index_bytes: bytes,
        stats: oracle.stats(),
    }))
}

fn query(args: QueryArgs) -> Result<String, CliError> {
    require_file(&args.index)?;
    require_file(&args.input.graph)?;
    let oracle = AnyOracle::load(&args.index, &args.input.graph, args.input.symmetric_input)?;
    let fallback = args
        .fallback
        .then(|| args.search.map_or_else(|| default_search(&oracle), Search::from));
    let spec = QuerySpec {
        want_path: args.path,
        fallback,
    };
    Ok(oracle.query(args.source, args.target, spec)?.to_json())
}

fn bench(args: BenchArgs) -> Result<String, CliError> {
    let cfg = match &args.config {
        Some(path) => {
            require_file(path)?;
            ExperimentConfig::from_json_file(path)?
        }
        None => ExperimentConfig::default(),
    };
    let report = run_all(&cfg, args.workers)?;
    report.write(&args.out)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        out: &'a Path,
        intersection: Vec<(f64, f64)>,
        boundary_max_fraction: f64,
        radius: &'a [vicinity_bench::RadiusRow],
        latency: &'a [vicinity_bench::LatencyRow],
    }
    Ok(to_json(&Summary {
        out: &args.out,
        intersection: report.intersection.mean_by_alpha(),
        boundary_max_fraction: report.boundary.max_fraction,
        radius: &report.radius,
        latency: &report.latency.rows,
    }))
}

fn serve_cmd(args: ServeArgs) -> Result<String, CliError> {
    require_file(&args.index)?;
    require_file(&args.input.graph)?;
    let oracle = AnyOracle::load(&args.index, &args.input.graph, args.input.symmetric_input)?;
    let state = Arc::new(AppState::new(oracle));
    let mut runtime = tokio::runtime::Builder::new_multi_thread();
    if args.threads > 0 {
        runtime.worker_threads(args.threads);
    }
    let runtime = runtime.enable_all().build().map_err(CliError::Serve)?;
    runtime.block_on(serve(state, args.listen, |addr| {
        println!("{}", serde_json::json!({ "listening": addr.to_string() }));
    }))?;
    Ok(String::new())
}
