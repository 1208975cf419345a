use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;
use skillsched::format::parse_instance;
use skillsched::service::{router, AppState, ServiceConfig};

#[derive(Parser)]
#[command(name = "skillsched-whatif", version, about = "What-if HTTP service")]
struct Args {
    #[arg(long, env = "SKILLSCHED_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Instance to load at startup.
    #[arg(long, env = "SKILLSCHED_INSTANCE")]
    instance: Option<PathBuf>,
    /// Largest unpruned search size accepted by /api/exact.
    #[arg(long, default_value_t = 1e9)]
    exact_guard: f64,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let config = ServiceConfig {
        exact_guard: args.exact_guard,
        ..ServiceConfig::default()
    };
    let state = match &args.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path).unwrap_or_else(|e| {
                eprintln!("error: {}: {e}", path.display());
                std::process::exit(2);
            });
            let inst = parse_instance(&text).unwrap_or_else(|e| {
                eprintln!("error: {}: {e}", path.display());
                std::process::exit(2);
            });
            AppState::with_instance(config, inst)
        }
        None => AppState::new(config),
    };
    let listener = tokio::net::TcpListener::bind(args.addr).await.unwrap_or_else(|e| {
        eprintln!("error: bind {}: {e}", args.addr);
        std::process::exit(2);
    });
    eprintln!("listening on {}", args.addr);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .expect("server error");
}
