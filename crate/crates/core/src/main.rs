fn main() {
    std::process::exit(qsl_core::cli::run_cli(std::env::args_os()));
}
