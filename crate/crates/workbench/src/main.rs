fn main() {
    std::process::exit(katetov_workbench::cli::run(std::env::args_os()));
}
