use clap::Parser;

fn main() -> std::process::ExitCode {
    eol_cli::app::run(eol_cli::app::Cli::parse())
}
