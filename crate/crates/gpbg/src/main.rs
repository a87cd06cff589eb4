fn main() {
    std::process::exit(gpbg::cli::run(std::env::args_os()));
}
