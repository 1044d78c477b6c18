fn main() {
    std::process::exit(dying_channel::cli::run(std::env::args()));
}
