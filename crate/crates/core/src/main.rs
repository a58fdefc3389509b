fn main() {
    std::process::exit(ctdistill::cli::run(std::env::args_os()));
}
