fn main() {
    std::process::exit(wunklab::run_cli(std::env::args_os()));
}
