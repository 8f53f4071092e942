fn main() {
    std::process::exit(scorelab_cli::run(std::env::args_os()));
}
