fn main() {
    std::process::exit(lampwalk::cli::main());
}
