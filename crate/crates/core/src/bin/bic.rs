fn main() {
    std::process::exit(bic_core::cli::run(std::env::args().collect()));
}
