fn main() {
    std::process::exit(udw::cli::main_with_args(std::env::args_os()));
}
