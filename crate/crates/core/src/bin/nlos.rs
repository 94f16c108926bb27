fn main() {
    std::process::exit(nlos_core::cli::run(std::env::args_os()));
}
