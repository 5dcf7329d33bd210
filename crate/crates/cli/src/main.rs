fn main() {
    std::process::exit(chiralq_cli::main_with_args(std::env::args_os()));
}
