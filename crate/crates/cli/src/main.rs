fn main() {
    std::process::exit(bandinv_cli::run(std::env::args_os()));
}
