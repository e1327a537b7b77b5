fn main() -> std::process::ExitCode {
    phasespace::cli::run()
}
