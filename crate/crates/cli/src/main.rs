fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(ruinlab_cli::main_with_args(std::env::args_os()))
}
