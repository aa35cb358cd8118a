fn main() {
    std::process::exit(qharness::cli::run());
}
