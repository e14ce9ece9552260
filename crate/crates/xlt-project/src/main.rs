use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(xlt_project::cli::run(std::env::args_os()) as u8)
}
