fn main() {
    std::process::exit(eonplan::cli::main_with_args(std::env::args_os()));
}
