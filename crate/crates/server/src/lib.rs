//! HTTP interface over the project store. Every response body is what the
//! corresponding library call returns on the project's current situation.

mod error;
mod routes;

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

pub use error::ApiError;
pub use routes::{router, AppState, Created, ProjectView, Submitted};

use project_store::ProjectStore;
use sitcalc::Reasoner;
use tutor_app::AppConfig;

impl AppState {
    /// Opens the store under `data` with the registry of `config`.
    pub fn open(config: AppConfig, data: impl AsRef<Path>) -> Result<Self, ApiError> {
        let registry = config
            .registry()
            .map_err(|e| ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, "config", e.to_string()))?;
        let store = ProjectStore::open(data, Arc::new(Reasoner::new(Arc::new(registry))))?;
        Ok(Self { store: Arc::new(store), config: Arc::new(config) })
    }
}

/// Serves until ctrl-c.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
