fn main() {
    std::process::exit(holodyn::cli::run_from(std::env::args_os()));
}
