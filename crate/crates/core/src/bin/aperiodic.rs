fn main() {
    std::process::exit(aperiodic::cli::main_with_args(std::env::args_os()));
}
