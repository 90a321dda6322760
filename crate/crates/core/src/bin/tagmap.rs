use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let status = tagmap::cli::run(std::env::args_os(), &mut input, &mut out, &mut err);
    ExitCode::from(status as u8)
}
