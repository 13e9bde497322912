use std::process::ExitCode;

use clap::Parser;
use rsp_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out_path().map(ToOwned::to_owned);
    match execute(&cli) {
        Ok(report) => {
            if let Some(path) = out_path {
                if let Err(err) = std::fs::write(&path, &report) {
                    eprintln!("error: cannot write {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
