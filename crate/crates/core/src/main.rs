fn main() {
    std::process::exit(ewlab::cli::main_entry());
}
