fn main() {
    std::process::exit(prevlab::cli::main_with_args(std::env::args_os()));
}
