fn main() {
    std::process::exit(pq_lorentz::cli::main_entry());
}
