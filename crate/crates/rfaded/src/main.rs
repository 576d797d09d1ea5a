fn main() {
    std::process::exit(rfaded::cli::run(std::env::args_os()));
}
