fn main() {
    std::process::exit(taubnut_index::cli::main_with_args(std::env::args_os()));
}
