use std::process::ExitCode;

fn main() -> ExitCode {
    mtp::cli::run(std::env::args_os())
}
