fn main() {
    std::process::exit(rabiq::cli::run(std::env::args_os()));
}
