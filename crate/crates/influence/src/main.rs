fn main() {
    std::process::exit(influence::cli::run(std::env::args_os()));
}
