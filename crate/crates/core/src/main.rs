fn main() {
    std::process::exit(effstruct::cli::main_with(std::env::args_os()));
}
