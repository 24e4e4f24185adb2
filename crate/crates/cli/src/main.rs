use clap::Parser;
use log::LevelFilter;
use topicrank_cli::{error_kind, exit_code, run, Cli};

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("TOPICRANK_LOG").as_deref() {
        Err(_) | Ok("info") => LevelFilter::Info,
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => return Err(format!("TOPICRANK_LOG must be quiet, info or debug, got {other:?}")),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = init_logging() {
        eprintln!("error[config]: {msg}");
        std::process::exit(1);
    }
    if let Err(e) = run(cli) {
        let line = e.to_string().replace('\n', " ");
        eprintln!("error[{}]: {line}", error_kind(&e));
        std::process::exit(exit_code(&e));
    }
}
