fn main() {
    std::process::exit(rrw::cli::run(std::env::args_os()));
}
