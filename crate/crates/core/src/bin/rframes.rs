fn main() {
    rframes::cli::init_logging();
    std::process::exit(rframes::cli::main_with_args(std::env::args_os()));
}
