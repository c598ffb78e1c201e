fn main() -> std::process::ExitCode {
    splinemask_cli::run(std::env::args_os())
}
