fn main() {
    std::process::exit(hdgbem::harness::cli::run(std::env::args_os()));
}
