//! HTTP front end for IT-map sessions.
//!
//! Every endpoint is a thin adapter over [`itmap_core::Workbench`]. State
//! lives in memory and each mutation is written to the data directory
//! before it becomes visible, so a failed request leaves both copies
//! untouched. Pipelines over more than [`ServerConfig::sync_limit`] points
//! run as background jobs polled at `GET /jobs/{id}`.

pub mod error;
mod routes;
pub mod store;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use axum::Router;
use itmap_core::{SessionId, Workbench};
use serde::Serialize;
use tokio::net::TcpListener;
use tokio::sync::Semaphore;

pub use error::ApiError;
pub use store::Store;

pub const DEFAULT_SYNC_LIMIT: usize = 2000;

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    pub data_dir: PathBuf,
    /// Largest dataset embedded inside the request.
    pub sync_limit: usize,
    /// Background pipelines allowed to run at once.
    pub job_threads: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum JobState {
    Pending,
    Done { session: SessionId },
    Failed { error: ApiError },
}

pub(crate) struct Inner {
    pub(crate) workbench: Mutex<Workbench>,
    pub(crate) store: Store,
    pub(crate) jobs: Mutex<BTreeMap<u64, JobState>>,
    pub(crate) next_job: AtomicU64,
    pub(crate) sync_limit: usize,
    pub(crate) job_permits: Arc<Semaphore>,
}

/// Shared handle to the service state.
#[derive(Clone)]
pub struct AppState(pub(crate) Arc<Inner>);

impl AppState {
    /// Open (or create) a data directory and load everything in it.
    pub fn open(
        data_dir: impl Into<PathBuf>,
        sync_limit: usize,
        job_threads: usize,
    ) -> std::io::Result<Self> {
        let store = Store::open(data_dir)?;
        let workbench = store.load()?;
        tracing::info!(
            data_dir = %store.root().display(),
            datasets = workbench.datasets().count(),
            sessions = workbench.sessions().count(),
            "loaded data directory"
        );
        Ok(Self(Arc::new(Inner {
            workbench: Mutex::new(workbench),
            store,
            jobs: Mutex::new(BTreeMap::new()),
            next_job: AtomicU64::new(1),
            sync_limit,
            job_permits: Arc::new(Semaphore::new(job_threads.max(1))),
        })))
    }

    pub(crate) fn workbench(&self) -> MutexGuard<'_, Workbench> {
        self.0.workbench.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub(crate) fn jobs(&self) -> MutexGuard<'_, BTreeMap<u64, JobState>> {
        self.0.jobs.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub(crate) fn new_job(&self) -> u64 {
        let id = self.0.next_job.fetch_add(1, Ordering::Relaxed);
        self.jobs().insert(id, JobState::Pending);
        id
    }
}

pub fn router(state: AppState) -> Router {
    routes::router(state)
}

/// Bind and serve until ctrl-c.
pub async fn serve(config: ServerConfig) -> std::io::Result<()> {
    let state = AppState::open(&config.data_dir, config.sync_limit, config.job_threads)?;
    let listener = TcpListener::bind(config.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
