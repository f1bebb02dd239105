fn main() {
    std::process::exit(phaseflow_cli::run());
}
