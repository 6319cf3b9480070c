fn main() {
    std::process::exit(invkit::cli::run(std::env::args_os()));
}
