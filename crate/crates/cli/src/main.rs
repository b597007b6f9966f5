fn main() {
    std::process::exit(mhar_cli::main_with_args(std::env::args_os()));
}
