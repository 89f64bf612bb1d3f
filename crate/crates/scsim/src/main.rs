fn main() {
    std::process::exit(scsim::cli::run());
}
