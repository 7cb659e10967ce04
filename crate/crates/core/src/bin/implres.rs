fn main() {
    std::process::exit(implicit_res::cli::run(std::env::args_os()));
}
