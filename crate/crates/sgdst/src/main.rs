use std::process::ExitCode;

fn main() -> ExitCode {
    sgdst::cli::main_with_args(std::env::args_os())
}
