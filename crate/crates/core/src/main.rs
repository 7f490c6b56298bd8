fn main() {
    std::process::exit(polyinf::cli::run_from_env());
}
