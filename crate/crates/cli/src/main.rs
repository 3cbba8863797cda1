fn main() {
    std::process::exit(fqt_cli::run(std::env::args_os()));
}
