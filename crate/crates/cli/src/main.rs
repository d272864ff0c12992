mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{Map, Value};

use args::Cli;
use report::{failure_result, record, Failure, Status};

fn emit(v: &Value, pretty: bool) {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    println!("{}", s.expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let f = Failure::usage(e.kind().to_string());
            let command = argv.get(1).filter(|a| !a.starts_with('-')).cloned().unwrap_or_default();
            let pretty = argv.iter().any(|a| a == "--json");
            emit(&record(&command, Map::new(), Status::Error, failure_result(&f)), pretty);
            return ExitCode::from(Status::Error.exit_code() as u8);
        }
    };

    let mut ctx = commands::Ctx::new(&cli);
    let (status, result, summary) = match commands::run(&cli.command, &mut ctx) {
        Ok(o) => (o.status, o.result, o.summary),
        Err(f) => {
            let summary = format!("{}: {}", f.kind, f.message);
            (f.status, failure_result(&f), summary)
        }
    };
    if cli.verbose {
        eprintln!("{} [{}]: {}", cli.command.name(), status.as_str(), summary);
    }
    emit(&record(cli.command.name(), ctx.inputs, status, result), cli.json);
    ExitCode::from(status.exit_code() as u8)
}
