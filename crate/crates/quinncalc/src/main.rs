use std::env;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = env::args().collect();
    let (code, out) = quinncalc::cli::run(&args);
    print!("{out}");
    ExitCode::from(u8::try_from(code).unwrap_or(2))
}
