fn main() {
    std::process::exit(cartan_cli::run(std::env::args_os()));
}
