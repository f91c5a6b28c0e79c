fn main() {
    std::process::exit(pairseed::cli::run_from(std::env::args_os()));
}
