fn main() {
    std::process::exit(seppoly::cli::main_with(std::env::args_os()));
}
