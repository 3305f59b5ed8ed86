fn main() {
    std::process::exit(nef_bandit::harness::cli::main());
}
