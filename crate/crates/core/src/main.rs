fn main() {
    std::process::exit(srfid::cli::run(std::env::args_os()));
}
