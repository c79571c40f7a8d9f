fn main() -> std::process::ExitCode {
    mvsel::cli::main()
}
