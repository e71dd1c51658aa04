fn main() {
    std::process::exit(gatekit::cli::run(std::env::args_os()));
}
