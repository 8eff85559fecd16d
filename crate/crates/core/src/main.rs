fn main() {
    std::process::exit(tweet2vec::cli::main_with_args(std::env::args_os()));
}
