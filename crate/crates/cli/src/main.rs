use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use jetlift_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.command.common().json {
                serde_json::to_string_pretty(&out.json).expect("serializable")
            } else {
                out.text.clone()
            };
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
