fn main() {
    std::process::exit(fbnet::cli::run_from(std::env::args_os()));
}
