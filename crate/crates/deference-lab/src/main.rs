use clap::Parser;
use deference_lab::cli::{run, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(run(&args));
}
