use clap::Parser;
use intrinsic_metrics_cli::{resolve, run_with_threads, thread_cap, Args, THREADS_ENV};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args = Args::parse();
    let env = std::env::var(THREADS_ENV).ok();
    let result = thread_cap(env.as_deref()).and_then(|threads| {
        let rc = resolve(&args)?;
        run_with_threads(&rc, threads)
    });
    match result {
        Ok(text) => {
            if std::io::stdout().write_all(text.as_bytes()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
