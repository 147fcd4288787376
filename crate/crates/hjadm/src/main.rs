use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hjadm::run::write_config_failure;
use hjadm::{load_config, run, ErrorClass, Format, Subcommand};
use log::{error, LevelFilter};

/// Adomian series, characteristics and finite differences for
/// u_t + H(u_x) = 0.
#[derive(Parser, Debug)]
#[command(name = "hjadm", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `outputs.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format, overriding `outputs.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn init_logging() {
    let level = match std::env::var("HJADM_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok("info") | Err(_) => LevelFilter::Info,
        Ok(other) => {
            eprintln!("HJADM_LOG={other} not understood; using info");
            LevelFilter::Info
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are config errors; help and version succeed
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_logging();

    let mut cfg = match load_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("{e}");
            if let Some(dir) = &cli.out {
                if let Err(io) = write_config_failure(cli.subcommand, dir, &e.to_string()) {
                    error!("cannot write manifest: {io}");
                }
            }
            return ExitCode::from(ErrorClass::Config.exit_code() as u8);
        }
    };
    if let Some(dir) = cli.out {
        cfg.file.outputs.dir = dir;
    }
    if let Some(format) = cli.format {
        cfg.file.outputs.format = format;
    }

    match run(cli.subcommand, &cfg) {
        Ok(manifest) => ExitCode::from(manifest.exit_code() as u8),
        Err(e) => {
            error!("cannot write outputs to {}: {e}", cfg.out_dir().display());
            ExitCode::from(ErrorClass::Io.exit_code() as u8)
        }
    }
}
