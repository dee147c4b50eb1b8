use std::process::ExitCode;

fn main() -> ExitCode {
    lcdrive::cli::main_with_args(std::env::args_os())
}
