fn main() {
    std::process::exit(binmrf::cli::run(std::env::args_os()));
}
