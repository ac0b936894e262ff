fn main() -> std::process::ExitCode {
    cheaplearn::cli::main_entry()
}
