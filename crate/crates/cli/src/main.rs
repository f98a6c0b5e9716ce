use clap::Parser;

fn main() {
    std::process::exit(arena_cli::execute(arena_cli::Cli::parse()));
}
