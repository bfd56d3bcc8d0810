use std::io::Write;

fn main() {
    let outcome = heun_twostate::cli::run(std::env::args_os());
    let _ = std::io::stdout().lock().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
