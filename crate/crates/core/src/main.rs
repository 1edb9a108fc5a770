use std::io::Write;

fn main() {
    if let Err(e) = sdefi::cli::init_threads_from_env() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = sdefi::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
