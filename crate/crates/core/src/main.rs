fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(lrank2::cli::main(&argv));
}
