fn main() {
    std::process::exit(uncervals::cli::run(std::env::args_os()));
}
