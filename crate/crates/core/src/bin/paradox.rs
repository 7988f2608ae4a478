fn main() {
    std::process::exit(paradox::cli::main());
}
