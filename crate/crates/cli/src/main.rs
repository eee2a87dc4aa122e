fn main() {
    std::process::exit(snv_cli::run_command(std::env::args_os()));
}
