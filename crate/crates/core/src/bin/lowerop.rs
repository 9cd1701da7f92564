use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = lowerop::cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(outcome.stdout.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.exit_code as u8)
}
