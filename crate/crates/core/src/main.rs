fn main() {
    std::process::exit(lamplighter_speed::cli::main_with_args(std::env::args_os()));
}
