use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = semchart::cli::run(std::env::args_os(), io::stdin().lock(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
