use clap::Parser;
use ptchain::cli::{run, Cli, CliError};

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(cli.command) {
        if matches!(&e, CliError::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) {
            return;
        }
        eprintln!("ptchain: {e}");
        std::process::exit(e.exit_code());
    }
}
