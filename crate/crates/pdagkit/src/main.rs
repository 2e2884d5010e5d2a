fn main() {
    std::process::exit(pdagkit::cli::run(std::env::args_os()));
}
