//! HTTP API over the patch repository.
//!
//! Mutations go through a single writer thread ([`RepoHandle`]); request
//! handlers read immutable snapshots. Patch resources are served as JSON or
//! Turtle depending on the `Accept` header.

mod config;
mod error;
mod routes;
mod writer;

use std::io;

use patchr_core::{FileJournal, MemoryJournal, RepositoryError};
use thiserror::Error;

pub use config::{parse_dataset_registry, ApiConfig};
pub use error::ApiError;
pub use routes::router;
pub use writer::RepoHandle;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Repository(#[from] RepositoryError),
    #[error("cannot listen on the configured address: {0}")]
    Bind(io::Error),
    #[error("server failed: {0}")]
    Serve(io::Error),
}

/// Opens the configured journal and starts the writer.
pub fn open_repository(config: &ApiConfig) -> Result<RepoHandle, RepositoryError> {
    match &config.journal_path {
        Some(path) => {
            let journal = FileJournal::open(path).map_err(RepositoryError::Journal)?;
            RepoHandle::start(journal, config.repo_base.clone())
        }
        None => RepoHandle::start(MemoryJournal::new(), config.repo_base.clone()),
    }
}

/// Serves the API until interrupted.
pub async fn serve(config: ApiConfig) -> Result<(), ServeError> {
    let repo = open_repository(&config)?;
    let listener = tokio::net::TcpListener::bind(config.listen).await.map_err(ServeError::Bind)?;
    tracing::info!(
        address = %listener.local_addr().map_err(ServeError::Bind)?,
        patches = repo.snapshot().len(),
        "patch repository listening"
    );
    axum::serve(listener, router(repo, config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(ServeError::Serve)
}
