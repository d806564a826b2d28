use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use quadcoach::config::ServiceConfig;
use quadcoach::export::export_dataset;
use quadcoach::http::router;
use quadcoach::replay::verify_store;
use quadcoach::service::SessionService;
use quadcoach::store::Store;
use quadcoach_core::sim::ComponentSpecs;
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "quadcoach", version, about = "Landing-trainer session server")]
struct Cli {
    /// Service configuration file; built-in defaults when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured data directory.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP and WebSocket API.
    Serve {
        /// Address to listen on; overrides the configured one.
        #[arg(long)]
        bind: Option<String>,
        /// Port to listen on; overrides the configured one.
        #[arg(long)]
        port: Option<u16>,
    },
    /// Write trial rows and trajectories for analysis.
    Export {
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Replay every stored input log against its stored trajectory.
    Verify,
    /// Print the default configuration.
    InitConfig,
}

fn load_config(cli: &Cli) -> Result<ServiceConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            ServiceConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => ServiceConfig::default(),
    };
    if let Some(dir) = &cli.data_dir {
        config.data_dir = dir.clone();
    }
    Ok(config)
}

async fn serve(mut config: ServiceConfig, bind: Option<String>, port: Option<u16>) -> Result<()> {
    if let Some(bind) = bind {
        config.bind = bind;
    }
    if let Some(port) = port {
        config.port = port;
    }
    let service = SessionService::from_config(&config).context("starting session service")?;
    let addr = format!("{}:{}", config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let config = load_config(&cli)?;
    match cli.command {
        Command::Serve { bind, port } => {
            tokio::runtime::Runtime::new()?.block_on(serve(config, bind, port))?;
        }
        Command::Export { out } => {
            let store = Store::open(&config.data_dir)?;
            let summary = export_dataset(&store, &out)?;
            println!(
                "exported {} rows from {} sessions and {} trajectories to {}",
                summary.rows,
                summary.sessions,
                summary.trajectories,
                out.display()
            );
        }
        Command::Verify => {
            let store = Store::open(&config.data_dir)?;
            let specs = ComponentSpecs::from_set(&config.specs()?)?;
            let mismatches = verify_store(&store, &config.pipeline.sim, &specs)?;
            for m in &mismatches {
                println!(
                    "session {} trial {}: differs from line {}",
                    m.session, m.index, m.line
                );
            }
            if !mismatches.is_empty() {
                bail!("{} trials do not replay", mismatches.len());
            }
            println!("all trials replay exactly");
        }
        Command::InitConfig => println!("{}", serde_json::to_string_pretty(&config)?),
    }
    Ok(())
}
