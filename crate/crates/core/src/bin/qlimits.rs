fn main() {
    std::process::exit(quantum_limits::cli::run(std::env::args_os()));
}
