fn main() {
    std::process::exit(frachs_cli::run(std::env::args_os()).code());
}
