use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use fqprod::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = execute(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fqprod: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
