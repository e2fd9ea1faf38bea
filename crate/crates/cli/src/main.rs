fn main() {
    std::process::exit(minvar_cli::run(std::env::args_os()));
}
