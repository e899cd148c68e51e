use clap::Parser;

fn main() {
    let cli = hsc_cli::app::Cli::parse();
    if let Err(e) = hsc_cli::app::run(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
