fn main() {
    std::process::exit(kerrmodes::cli::main_with_args(std::env::args_os()));
}
