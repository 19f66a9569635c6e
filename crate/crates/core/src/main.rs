fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(singular_orbits::cli::run(&args));
}
