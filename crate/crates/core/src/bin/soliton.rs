fn main() {
    std::process::exit(soliton_core::cli::run(std::env::args_os()));
}
