use std::process::ExitCode;

fn main() -> ExitCode {
    let code = sarfima_cli::run(std::env::args_os());
    ExitCode::from(code)
}
