fn main() {
    std::process::exit(nif_cli::run(std::env::args_os()));
}
