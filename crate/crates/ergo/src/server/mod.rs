//! JSON query service over loaded, scored datasets.
//!
//! Every GET is side-effect free and returns exactly what the matching
//! `ergo-core` call returns. Brush state lives in sessions.

mod routes;
mod state;

use std::net::SocketAddr;
use std::sync::Arc;

pub use routes::router;
pub use state::{AppState, DatasetEntry, Session};

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(state))).await
}
