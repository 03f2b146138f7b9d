fn main() {
    std::process::exit(iqfi_lab::cli::run());
}
