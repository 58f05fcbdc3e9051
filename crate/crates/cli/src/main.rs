use clap::Parser;
use rfseries_cli::{execute, Cli, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.diagnostics {
                eprintln!("{line}");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    std::process::exit(code);
}
