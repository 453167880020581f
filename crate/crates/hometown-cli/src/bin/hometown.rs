use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hometown_cli::commands::run(std::env::args_os()) as u8)
}
