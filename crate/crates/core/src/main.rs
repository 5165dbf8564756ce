fn main() {
    std::process::exit(uplink_noma::cli::run(std::env::args_os()));
}
