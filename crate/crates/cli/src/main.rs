fn main() {
    std::process::exit(symlab_cli::run(std::env::args_os()));
}
