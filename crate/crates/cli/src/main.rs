use std::process::ExitCode;

fn main() -> ExitCode {
    snyder_cli::app::main()
}
