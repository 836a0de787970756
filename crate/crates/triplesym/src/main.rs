fn main() {
    std::process::exit(triplesym::cli::run());
}
