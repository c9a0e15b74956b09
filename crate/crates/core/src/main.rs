fn main() -> std::process::ExitCode {
    curvadapt::cli::main()
}
