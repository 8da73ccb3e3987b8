use clap::Parser;

fn main() {
    let cli = zetafam_cli::Cli::parse();
    std::process::exit(zetafam_cli::run(cli));
}
