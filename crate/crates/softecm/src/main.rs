fn main() {
    std::process::exit(softecm::cli::run(std::env::args_os()));
}
