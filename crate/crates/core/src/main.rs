fn main() {
    std::process::exit(echoaug::cli::main_with_args(std::env::args_os()));
}
