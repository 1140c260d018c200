use clap::Parser;

fn main() {
    let args = dyson_sim::cli::Args::parse();
    std::process::exit(dyson_sim::cli::main_with(args));
}
