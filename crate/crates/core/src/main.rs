fn main() {
    std::process::exit(tlsim::cli_main());
}
