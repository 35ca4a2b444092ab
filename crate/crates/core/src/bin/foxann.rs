fn main() {
    env_logger::init();
    std::process::exit(foxann::cli::main(std::env::args_os()));
}
