//! Serves the fixture over HTTP.
//!
//! cargo run --example server [port]
//!
//! curl -s localhost:7878/api/model
//! curl -s -XPOST localhost:7878/api/evaluate -d '{"id":"base","requirement_levels":{"req1":1,"req2":1},"or_selections":{"g12":"M"}}'

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use goalgraph::server::{serve, AppState};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port: u16 = std::env::args().nth(1).and_then(|p| p.parse().ok()).unwrap_or(7878);
    let model = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/parts.goal");
    let state = Arc::new(AppState::new(Some(model)));
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    println!("listening on http://{addr}");
    serve(state, addr, None).await
}
