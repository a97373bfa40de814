fn main() {
    std::process::exit(tvflow::cli::run());
}
