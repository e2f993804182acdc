use std::process::ExitCode;

use clap::Parser;
use dhstab_cli::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli, &mut std::io::stdout().lock());
    ExitCode::from(code)
}
