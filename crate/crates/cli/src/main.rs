use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = lexishot_cli::run(std::env::args(), &mut io::stdout().lock());
    ExitCode::from(code as u8)
}
