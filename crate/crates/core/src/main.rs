fn main() {
    std::process::exit(shapevec::cli::run(std::env::args_os()));
}
