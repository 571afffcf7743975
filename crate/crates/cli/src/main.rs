fn main() {
    std::process::exit(hk_cli::main_with_args(std::env::args_os()));
}
