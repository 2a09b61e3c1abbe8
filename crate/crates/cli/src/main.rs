use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = wffd_cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(wffd_cli::EXIT_USAGE as u8);
    }
    let code = wffd_cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
