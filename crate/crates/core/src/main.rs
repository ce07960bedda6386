use std::process::ExitCode;

fn main() -> ExitCode {
    caponef::cli::main_with_args(std::env::args_os())
}
