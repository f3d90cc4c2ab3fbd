fn main() {
    std::process::exit(hurstlab::cli::main_with_std());
}
