fn main() {
    std::process::exit(lhz_cli::main_with(std::env::args_os()));
}
