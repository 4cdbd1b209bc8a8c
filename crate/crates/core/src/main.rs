use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let outcome = balanced_g::cli::run_args(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe leaves nothing useful to report
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    std::process::exit(outcome.code);
}
