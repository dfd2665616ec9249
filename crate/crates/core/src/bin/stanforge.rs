use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(stanforge::cli::run(std::env::args_os()))
}
