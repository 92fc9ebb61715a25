fn main() {
    std::process::exit(gw_monogamy::cli::run(std::env::args_os()));
}
