fn main() {
    std::process::exit(persuasion::cli::main_entry());
}
