use std::process::ExitCode;

fn main() -> ExitCode {
    l2disc::cli::main_with_args(std::env::args().collect())
}
