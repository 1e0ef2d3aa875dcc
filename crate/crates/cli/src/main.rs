use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(backcast::app::run_with_args(std::env::args_os()))
}
