fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(mmwave_sim::cli::main_with_args(&args));
}
