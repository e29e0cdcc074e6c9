use std::io;
use std::process::ExitCode;

use clap::Parser;
use otreduce_cli::{run_experiment, write_report, ExperimentConfig};

fn main() -> ExitCode {
    let cfg = ExperimentConfig::parse();
    let result = run_experiment(&cfg).and_then(|report| {
        write_report(&report, cfg.out.as_deref(), &mut io::stdout().lock())?;
        Ok(report.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("otreduce: {} assertions failed", cfg.command.name());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("otreduce: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
