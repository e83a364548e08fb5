fn main() {
    std::process::exit(lindtop_cli::run(std::env::args_os()));
}
