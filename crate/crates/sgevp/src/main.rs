use clap::Parser;

fn main() {
    let cli = sgevp::cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = sgevp::cli::execute(cli, &mut stdout.lock()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
