fn main() {
    std::process::exit(icso_enhance::cli::run(std::env::args_os()));
}
