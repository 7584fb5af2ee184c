use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use eurqsi::cli::{self, Cli};
use eurqsi::output::{write_atomic, OUTPUT_DIR_ENV};
use eurqsi::report::Format;

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match cli::run(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("eurqsi: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        let name = format!("{}.{}", outcome.stem, Format::from(args.format).extension());
        if let Err(e) = write_atomic(dir.as_ref(), &name, &outcome.body) {
            eprintln!("eurqsi: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    let mut out = std::io::stdout().lock();
    if out.write_all(outcome.body.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    outcome.exit_code()
}
