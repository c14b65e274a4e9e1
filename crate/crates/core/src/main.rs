fn main() {
    std::process::exit(quasimodes::cli::main_with_args(std::env::args_os()))
}
