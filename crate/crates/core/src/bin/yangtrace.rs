fn main() {
    std::process::exit(yangtrace::cli::main_with_args(std::env::args_os()));
}
