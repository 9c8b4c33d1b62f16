fn main() {
    std::process::exit(glide::cli::run(std::env::args_os()));
}
