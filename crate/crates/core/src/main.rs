fn main() {
    std::process::exit(chorowidth::cli::main_with_args(std::env::args_os()));
}
