use std::io::Write;

use clap::Parser;
use sitcalc_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let result = run(&cli, stdin.lock(), &mut stdout);
    let _ = stdout.flush();
    if let Err(f) = result {
        eprintln!("{}", f.message);
        std::process::exit(f.code);
    }
}
