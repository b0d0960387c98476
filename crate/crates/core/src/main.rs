fn main() -> std::process::ExitCode {
    boilerstrip::cli::main()
}
