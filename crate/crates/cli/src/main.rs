use std::process::ExitCode;

use clap::Parser;
use modulieis_cli::{dispatch, emit, Cli, CommandSpec};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // Help and version go to stdout with status 0; parse errors exit 2.
        Err(e) => e.exit(),
    };
    let result = CommandSpec::from_cli(cli).and_then(|spec| {
        let report = dispatch(&spec)?;
        emit(&report, spec.out.as_deref())?;
        Ok(report.status.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("modulieis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
