fn main() {
    std::process::exit(stochastic_evasion::cli::run_cli(std::env::args_os()));
}
