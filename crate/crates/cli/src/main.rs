fn main() { std::process::exit(monoconv::run(std::env::args().collect())) }
