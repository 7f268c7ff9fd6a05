fn main() {
    std::process::exit(quantum_recoil::cli::run(std::env::args_os()));
}
