use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = msle_cli::Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    ExitCode::from(msle_cli::run(&cli) as u8)
}
