fn main() {
    std::process::exit(enetsearch_cli::run(std::env::args_os()));
}
