fn main() {
    std::process::exit(oufreq_cli::main_with_args(std::env::args_os()));
}
