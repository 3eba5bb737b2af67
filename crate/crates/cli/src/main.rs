fn main() {
    std::process::exit(nitrq_cli::run(std::env::args_os()));
}
