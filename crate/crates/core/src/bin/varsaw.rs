fn main() {
    std::process::exit(varsaw_core::cli::main_entry(std::env::args_os()));
}
