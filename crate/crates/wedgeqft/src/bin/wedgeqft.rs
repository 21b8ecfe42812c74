fn main() {
    std::process::exit(wedgeqft::cli::main_with_args(std::env::args_os()));
}
