fn main() {
    std::process::exit(mumw::cli::run(std::env::args_os()));
}
