fn main() {
    std::process::exit(logsens::cli::main_with_args(std::env::args_os()));
}
