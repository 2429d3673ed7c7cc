fn main() {
    std::process::exit(hesm::cli::run(std::env::args_os()));
}
