fn main() {
    std::process::exit(polymat::cli::run(std::env::args_os()));
}
