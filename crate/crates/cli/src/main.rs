//! The `mcdeform` binary: parses the command line, runs the command and
//! renders the report. Reports go to stdout (or `--out`); the only thing
//! written to stderr is the wall-time line, so reports stay byte-stable.

use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use mcdeform_cli::report::Report;
use mcdeform_cli::run::{execute, Cli, Format};

fn main() {
    let start = Instant::now();
    let echoed: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = execute(&cli.command);
    let report = Report {
        command: echoed.join(" "),
        status: outcome.status,
        payload: outcome.payload,
    };
    let rendered = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
                eprintln!("cannot write {}: {e}", path.display());
                std::process::exit(3);
            }
        }
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(rendered.as_bytes()).expect("stdout is writable");
            stdout.flush().expect("stdout flushes");
        }
    }
    eprintln!("wall-time: {} ms", start.elapsed().as_millis());
    std::process::exit(outcome.exit_code);
}
