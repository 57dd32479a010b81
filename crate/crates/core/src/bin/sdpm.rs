fn main() {
    std::process::exit(sdpm::cli::run(std::env::args_os()));
}
