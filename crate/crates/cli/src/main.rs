use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use control_approx_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            let _ = std::io::stdout().flush();
            if !out.stderr.is_empty() {
                eprintln!("{}", out.stderr);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
