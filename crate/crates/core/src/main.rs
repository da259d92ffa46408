fn main() {
    std::process::exit(shuffled_core::cli::run(std::env::args_os()));
}
