fn main() {
    std::process::exit(vacuum_friction::cli::run());
}
