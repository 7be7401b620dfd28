fn main() {
    std::process::exit(fockpart::cli::run(std::env::args_os()));
}
