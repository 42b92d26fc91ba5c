use clap::Parser;

fn main() {
    let cli = topotrack_cli::Cli::parse();
    if let Err(e) = topotrack_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
