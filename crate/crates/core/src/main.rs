fn main() {
    std::process::exit(circlelab::cli::dispatch(std::env::args_os()));
}
