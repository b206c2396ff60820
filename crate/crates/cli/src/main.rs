fn main() {
    std::process::exit(hydroq_cli::run(std::env::args_os()));
}
