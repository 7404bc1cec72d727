fn main() {
    std::process::exit(ooscam::cli::run(std::env::args_os()));
}
