//! `bandcut <command>`: bulk bands, gaps, edge spectra, spectral flow, gap
//! filling and decay rates, written as CSV and JSON artifacts.

mod cache;
mod commands;
mod config;

use cache::{cache_key, write_atomic, Cache};
use clap::Parser;
use commands::{Command, Header, RunError};
use config::RunConfig;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "bandcut", version, about = "Edge spectra of periodic Schrödinger operators on rotated half-planes")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Recompute even when a cached result exists.
    #[arg(long)]
    no_cache: bool,
}

/// What the cache key covers: everything that can change an artifact.
#[derive(Serialize)]
struct KeyFragment<'a> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    config: &'a RunConfig,
}

fn load_config(cli: &Cli) -> Result<RunConfig, RunError> {
    let mut cfg = match &cli.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError {
                code: "io",
                message: format!("{}: {e}", path.display()),
                field: None,
            })?;
            RunConfig::from_toml(&text).map_err(|e| RunError { code: "parse", message: e.to_string(), field: None })?
        }
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.no_cache {
        cfg.cache = false;
    }
    let violations = cfg.validate();
    if !violations.is_empty() {
        let fields: Vec<&str> = violations.iter().map(|v| v.field.as_str()).collect();
        let message: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(RunError { code: "invalid_config", message: message.join("; "), field: Some(fields.join(",")) });
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<String, RunError> {
    let cfg = load_config(cli)?;
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let keyed = RunConfig { output_dir: PathBuf::new(), cache: true, ..cfg.clone() };
    let version = env!("CARGO_PKG_VERSION");
    let key = cache_key(&KeyFragment { tool: "bandcut", version, command: cli.command, config: &keyed });
    let store = Cache::new(cfg.output_dir.join(".cache"));

    let cached = if cfg.cache { store.get(&key) } else { None };
    let entry = match cached {
        Some(entry) => {
            log::info!("cache hit {key}");
            entry
        }
        None => {
            let header = Header { tool: "bandcut", version, command: cli.command, cache_key: &key, config: &cfg };
            let entry = commands::run(cli.command, &header)?;
            if cfg.cache {
                store.put(&key, &entry)?;
            }
            entry
        }
    };
    let dir = cfg.output_dir.join(cli.command.name());
    for (name, text) in &entry.files {
        write_atomic(&dir.join(name), text.as_bytes())?;
    }
    write_atomic(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    Ok(entry.summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::from(if e.code == "invalid_config" { 2 } else { 1 })
        }
    }
}
