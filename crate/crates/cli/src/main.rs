fn main() {
    std::process::exit(kuzlab_cli::run(std::env::args_os()));
}
