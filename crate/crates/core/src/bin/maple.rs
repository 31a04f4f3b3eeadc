fn main() {
    std::process::exit(maple::cli::run(std::env::args_os()));
}
