fn main() {
    std::process::exit(omcool_cli::cli_main(std::env::args()));
}
