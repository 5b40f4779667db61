use clap::Parser;

use conekit::cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads(std::env::var("CONEKIT_THREADS").ok().as_deref()) {
        eprintln!("conekit: {e}");
        std::process::exit(2);
    }
    let code = run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
