use clap::Parser;

fn main() {
    let cli = ncdc_cli::Cli::parse();
    std::process::exit(ncdc_cli::run(&cli));
}
