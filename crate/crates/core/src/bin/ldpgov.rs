fn main() -> std::process::ExitCode {
    ldp_governance::cli::main()
}
