fn main() {
    std::process::exit(ellunit::cli::main_with_args(std::env::args_os()));
}
