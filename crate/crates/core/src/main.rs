fn main() {
    std::process::exit(regmodbp::cli::main_with(std::env::args_os()));
}
