fn main() {
    std::process::exit(gridpath::cli::run(std::env::args_os()));
}
