fn main() {
    std::process::exit(mtsurf::cli::run_cli(std::env::args_os()));
}
