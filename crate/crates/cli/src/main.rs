//! `itmap`: build, cut and render IT-map sessions, or serve them over HTTP.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itmap_core::dataset::{generate_gaussian_mixture, generate_spiral, to_csv};
use itmap_core::render::render_rp;
use itmap_core::{AttrKind, MdsMethod, Metric, SessionDocument, SessionParams, Sigma, Workbench};
use itmap_server::{ApiError, ServerConfig, DEFAULT_SYNC_LIMIT};

#[derive(Parser)]
#[command(
    name = "itmap",
    version,
    about = "In-tree maps for interactive clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a session from a CSV file and write its artifacts.
    Run(RunArgs),
    /// Render a saved session document as SVG.
    Render {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Start the HTTP service.
    Serve(ServeArgs),
    /// Write a synthetic labelled dataset as CSV.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    /// euclidean or hamming; defaults to the one matching --kind.
    #[arg(long)]
    metric: Option<Metric>,
    /// numeric or categorical; defaults to the kind of --metric.
    #[arg(long)]
    kind: Option<AttrKind>,
    /// Kernel width, or "auto".
    #[arg(long, default_value = "auto")]
    sigma: Sigma,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value = "classical")]
    method: MdsMethod,
    /// Cut this many of the longest edges.
    #[arg(long, value_name = "K")]
    cut_longest: Option<usize>,
    /// Zero-based column holding class labels.
    #[arg(long, value_name = "IDX")]
    labels_col: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "ITMAP_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    #[arg(long, env = "ITMAP_DATA_DIR", default_value = "itmap-data")]
    data_dir: PathBuf,
    #[arg(long, env = "ITMAP_JOB_THREADS", default_value_t = 1)]
    job_threads: usize,
    #[arg(long, env = "ITMAP_SYNC_LIMIT", default_value_t = DEFAULT_SYNC_LIMIT)]
    sync_limit: usize,
}

#[derive(Subcommand)]
enum Generate {
    /// Isotropic unit-variance Gaussian blobs.
    Gaussian {
        #[arg(long, default_value_t = 100)]
        per_cluster: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        #[arg(long, default_value_t = 10.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interleaved planar spiral arms.
    Spiral {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        arms: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), ApiError> {
    match command {
        Command::Run(args) => run(args),
        Command::Render { session, out } => {
            let doc = SessionDocument::from_slice(&read(&session)?)?;
            write(&out, render_rp(&doc)?.as_bytes())
        }
        Command::Serve(args) => serve(args),
        Command::Generate(which) => {
            let (ds, out) = match which {
                Generate::Gaussian {
                    per_cluster,
                    dim,
                    clusters,
                    separation,
                    seed,
                    out,
                } => (
                    generate_gaussian_mixture(per_cluster, dim, clusters, separation, seed)?,
                    out,
                ),
                Generate::Spiral {
                    n,
                    arms,
                    noise,
                    seed,
                    out,
                } => (generate_spiral(n, arms, noise, seed)?, out),
            };
            let text = to_csv(&ds);
            match out {
                Some(path) => write(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn run(args: RunArgs) -> Result<(), ApiError> {
    let kind = match (args.kind, args.metric) {
        (Some(kind), Some(metric)) if metric.attr_kind() != kind => {
            return Err(itmap_core::Error::MetricMismatch { metric, kind }.into())
        }
        (Some(kind), _) => kind,
        (None, Some(metric)) => metric.attr_kind(),
        (None, None) => AttrKind::Numeric,
    };
    let text = String::from_utf8(read(&args.input)?).map_err(|_| {
        ApiError::bad_request(format!("{} is not UTF-8 text", args.input.display()))
    })?;
    let name = args.input.file_stem().map_or_else(
        || "dataset".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );

    let mut wb = Workbench::new();
    let dataset = wb.import_csv(&text, kind, args.labels_col, &name)?;
    let params = SessionParams {
        sigma: args.sigma,
        metric: args.metric,
        dim: args.dim,
        method: args.method,
    };
    let id = wb.create_session(&dataset, &params)?;
    if let Some(k) = args.cut_longest {
        wb.session_mut(id)?.cut_longest(k)?;
    }

    let session = wb.session(id)?;
    let doc = session.to_document();
    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    write(&args.out.join("session.json"), &doc.to_bytes())?;
    let assignment = wb.merged_assignment(id)?;
    write(
        &args.out.join("assignment.csv"),
        assignment.to_csv(Some(session.node_ids())).as_bytes(),
    )?;
    write(&args.out.join("layout.json"), &session.layout().to_bytes())?;
    write(&args.out.join("it_rp.svg"), render_rp(&doc)?.as_bytes())?;

    match wb.truth(id)? {
        Some(_) => println!(
            "clusters={} error_rate={}",
            assignment.k(),
            wb.error_rate(id)?
        ),
        None => println!("clusters={}", assignment.k()),
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), ApiError> {
    let config = ServerConfig {
        bind: args.bind,
        data_dir: args.data_dir,
        sync_limit: args.sync_limit,
        job_threads: args.job_threads,
    };
    tokio::runtime::Runtime::new()
        .map_err(ApiError::storage)?
        .block_on(itmap_server::serve(config))
        .map_err(ApiError::storage)
}

fn read(path: &Path) -> Result<Vec<u8>, ApiError> {
    fs::read(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), ApiError> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> ApiError {
    ApiError::storage(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}
