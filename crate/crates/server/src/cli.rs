//! Command-line front end: `build`, `serve`, `query`, `export`, `import`.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use semtrail::pipeline::{run_build, BuildError, PipelineConfig};
use semtrail::store::{ModelStore, Table};
use semtrail::Error;

use crate::api;
use crate::query::{self, QueryError, Scale};

#[derive(Debug, Parser)]
#[command(name = "semtrail", version, about = "Diachronic word embeddings, similarity and emotion trajectories")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, env = "SEMTRAIL_CONFIG")]
    pub config: Option<PathBuf>,
    /// Store file; overrides the config's `store`.
    #[arg(long, global = true, env = "SEMTRAIL_STORE")]
    pub store: Option<PathBuf>,
    /// Worker threads for data-parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Restrict to one corpus.
    #[arg(long, global = true)]
    pub corpus: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write the store file.
    Build(BuildArgs),
    /// Serve the REST API over a store file.
    Serve(ServeArgs),
    /// Answer one query from a store file as tab-separated rows.
    Query {
        #[command(subcommand)]
        query: QueryCommand,
    },
    /// Dump every table of a store as CSV into a directory.
    Export { dir: PathBuf },
    /// Rebuild a store file from a directory of CSV tables.
    Import { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eig_weight: Option<f64>,
    #[arg(long)]
    pub svd_seed: Option<u64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub contexts_k: Option<usize>,
    #[arg(long)]
    pub min_seed_sim: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SEMTRAIL_BIND", default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long, env = "SEMTRAIL_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Directory of static UI assets served at `/`.
    #[arg(long, env = "SEMTRAIL_STATIC")]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum QueryCommand {
    Similarity { word1: String, word2: String },
    Emotion {
        word: String,
        #[arg(long, default_value = "raw")]
        scale: String,
    },
    Frequency { word: String },
    Context {
        word: String,
        #[arg(long)]
        k: Option<usize>,
    },
    Neighbors {
        word: String,
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Exit status and message of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Failure::new(e.exit_code(), e.to_string())
    }
}

/// Input and configuration problems exit 2; failures inside the numeric
/// stages exit 1.
fn build_exit_code(e: &BuildError) -> i32 {
    match e.source {
        Error::EmptyVocabulary { .. }
        | Error::EmptySlice(_)
        | Error::EmptyMatrix
        | Error::DimensionMismatch { .. }
        | Error::NoUsableSeeds(_)
        | Error::Consistency(_) => 1,
        _ => 2,
    }
}

fn load_store(path: Option<&Path>) -> Result<ModelStore, Failure> {
    let path = path.ok_or_else(|| Failure::new(2, "no store given (use --store)"))?;
    ModelStore::load(path).map_err(|e| Failure::new(2, format!("cannot read store {}: {e}", path.display())))
}

fn store_path(cli: &Cli) -> Result<Option<PathBuf>, Failure> {
    if cli.store.is_some() {
        return Ok(cli.store.clone());
    }
    match &cli.config {
        Some(cfg) => Ok(PipelineConfig::load(cfg).map_err(|e| Failure::new(2, e.to_string()))?.store),
        None => Ok(None),
    }
}

fn resolve_corpus(store: &ModelStore, requested: Option<&str>) -> Result<String, Failure> {
    if let Some(c) = requested {
        return Ok(c.to_string());
    }
    let ids: Vec<&str> = store.corpora().map(|c| c.info.corpus_id.as_str()).collect();
    match ids.as_slice() {
        [only] => Ok(only.to_string()),
        _ => Err(Failure::new(2, format!("store holds {} corpora; pick one with --corpus", ids.len()))),
    }
}

fn configure_workers(workers: Option<usize>) -> Result<(), Failure> {
    let Some(n) = workers else { return Ok(()) };
    if n == 0 {
        return Err(Failure::new(2, "--workers must be >= 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::new(2, format!("thread pool: {e}")))?;
    Ok(())
}

fn build(cli: &Cli, args: &BuildArgs) -> Result<String, Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::new(2, "build needs --config"))?;
    let mut cfg = PipelineConfig::load(path).map_err(|e| Failure::new(2, format!("config stage failed: {e}")))?;
    macro_rules! apply {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v; })* };
    }
    apply!(window, min_count, dim, alpha, eig_weight, svd_seed, top_k, contexts_k, min_seed_sim);
    if let Some(store) = &cli.store {
        cfg.store = Some(store.clone());
    }
    let out = cfg
        .store
        .clone()
        .ok_or_else(|| Failure::new(2, "config stage failed: no store path (set `store` or --store)"))?;
    let (store, report) = run_build(&cfg, cli.corpus.as_deref()).map_err(|e| Failure::new(build_exit_code(&e), e.to_string()))?;
    store
        .save(&out)
        .map_err(|e| Failure::new(2, format!("write stage failed: {e}")))?;
    Ok(format!("{report}wrote {}\n", out.display()))
}

fn run_query(cli: &Cli, q: &QueryCommand) -> Result<String, Failure> {
    let store = load_store(store_path(cli)?.as_deref())?;
    let corpus = resolve_corpus(&store, cli.corpus.as_deref())?;
    let resp = match q {
        QueryCommand::Similarity { word1, word2 } => query::similarity(&store, &corpus, word1, word2),
        QueryCommand::Emotion { word, scale } => query::emotion(&store, &corpus, word, Scale::parse(scale)?),
        QueryCommand::Frequency { word } => query::frequency(&store, &corpus, word),
        QueryCommand::Context { word, k } => query::typical_context(&store, &corpus, word, *k),
        QueryCommand::Neighbors { word, k } => query::most_similar(&store, &corpus, word, *k),
    }?;
    Ok(query::to_tsv(&resp))
}

fn serve(cli: &Cli, args: &ServeArgs) -> Result<String, Failure> {
    let store = load_store(store_path(cli)?.as_deref())?;
    let addr: SocketAddr = format!("{}:{}", args.bind, args.port)
        .parse()
        .map_err(|e| Failure::new(2, format!("bad bind address: {e}")))?;
    let app = api::router(Arc::new(store), args.static_dir.clone());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(1, e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::new(2, format!("bind {addr}: {e}")))?;
        log::info!("listening on http://{addr}");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::new(1, e.to_string()))
    })?;
    Ok(String::new())
}

fn export(cli: &Cli, dir: &Path) -> Result<String, Failure> {
    let store = load_store(store_path(cli)?.as_deref())?;
    store
        .export_csv_dir(dir)
        .map_err(|e| Failure::new(2, e.to_string()))?;
    let names: Vec<&str> = Table::ALL.iter().map(|t| t.name()).collect();
    Ok(format!("exported {} to {}\n", names.join(", "), dir.display()))
}

fn import(cli: &Cli, dir: &Path) -> Result<String, Failure> {
    let out = store_path(cli)?.ok_or_else(|| Failure::new(2, "no store given (use --store)"))?;
    let store = ModelStore::import_csv_dir(dir).map_err(|e| Failure::new(2, e.to_string()))?;
    store.save(&out).map_err(|e| Failure::new(2, e.to_string()))?;
    Ok(format!("wrote {}\n", out.display()))
}

/// Runs a parsed command, returning its standard output.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    configure_workers(cli.workers)?;
    match &cli.command {
        Command::Build(args) => build(cli, args),
        Command::Serve(args) => serve(cli, args),
        Command::Query { query } => run_query(cli, query),
        Command::Export { dir } => export(cli, dir),
        Command::Import { dir } => import(cli, dir),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
