fn main() {
    std::process::exit(taskcl::cli::run());
}
