fn main() {
    std::process::exit(nilgeo::cli::run());
}
