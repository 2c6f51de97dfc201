fn main() {
    std::process::exit(reqonto::cli::run(std::env::args_os()));
}
