fn main() {
    std::process::exit(algocool::cli::main_with_args(std::env::args_os()));
}
