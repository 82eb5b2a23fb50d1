mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use output::Failure;

fn dispatch(cli: &Cli) -> Result<output::Report, Failure> {
    match &cli.command {
        Command::Classify(a) => commands::classify(a),
        Command::Rate(a) => commands::rate(a),
        Command::Run(a) => commands::run(cli, a),
        Command::VerifyCertificate(a) => commands::verify(cli, a),
        Command::SearchWorstcase(a) => commands::search(cli, a),
        Command::Sweep(a) => commands::sweep_cmd(cli, a),
        Command::Schedule(a) => commands::schedule(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let format = cli.out.unwrap_or(match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    });
    match dispatch(&cli) {
        Ok(report) => {
            if let Some(b) = &report.banner {
                eprintln!("{b}");
            }
            let mut out = std::io::stdout().lock();
            if let Err(e) = report.write(format, &mut out).and_then(|_| out.flush()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            match &report.failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
