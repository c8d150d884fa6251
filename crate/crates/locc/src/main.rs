use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use locc::cli::{run, Cli, EXIT_INPUT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    };
    ExitCode::from(run(&cli) as u8)
}
