use clap::Parser;

fn main() {
    let cli = percofpp::cli::Cli::parse();
    std::process::exit(percofpp::cli::execute(cli));
}
