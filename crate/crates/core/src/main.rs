use std::process::ExitCode;

use clap::Parser;
use xfrag::cli::{run, Cli};

fn main() -> ExitCode {
    // clap reports usage errors itself and exits with status 2
    let cli = Cli::parse();
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
