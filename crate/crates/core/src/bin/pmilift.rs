fn main() {
    std::process::exit(pmilift::cli::run_from(std::env::args_os()));
}
