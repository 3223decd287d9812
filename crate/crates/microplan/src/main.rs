fn main() {
    std::process::exit(microplan::cli::main() as i32)
}
