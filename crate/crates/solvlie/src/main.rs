fn main() {
    std::process::exit(solvlie::cli::run());
}
