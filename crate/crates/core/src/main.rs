fn main() {
    std::process::exit(jacobi_spectra::cli::run(std::env::args_os()));
}
