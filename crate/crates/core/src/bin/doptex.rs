use std::process::ExitCode;

fn main() -> ExitCode {
    let code = std::panic::catch_unwind(|| doptex_core::cli::run(std::env::args_os()))
        .unwrap_or(doptex_core::cli::EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
