use std::io::Write;

use ergodic_dirac::cli::{run, EXIT_USAGE};

fn main() {
    let outcome = run(std::env::args_os());
    let written = if outcome.exit_code == EXIT_USAGE {
        std::io::stderr().write_all(outcome.output.as_bytes())
    } else if outcome.written_to.is_none() {
        std::io::stdout().write_all(outcome.output.as_bytes())
    } else {
        Ok(())
    };
    if written.is_err() {
        std::process::exit(EXIT_USAGE);
    }
    std::process::exit(outcome.exit_code);
}
