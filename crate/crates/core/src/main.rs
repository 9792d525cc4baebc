fn main() {
    std::process::exit(surgeflow::cli::run(std::env::args_os()));
}
