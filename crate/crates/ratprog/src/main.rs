fn main() {
    std::process::exit(ratprog::cli::run(std::env::args_os()));
}
