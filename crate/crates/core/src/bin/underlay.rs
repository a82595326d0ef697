fn main() -> std::process::ExitCode {
    underlay::cli::main()
}
