use std::io::Write;
use wsuper_cli::config::{workers_from_env, WORKERS_ENV};

fn main() {
    match workers_from_env() {
        #[cfg(feature = "parallel")]
        Ok(Some(n)) if n > 1 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: could not size the worker pool: {e}");
            }
        }
        Err(e) => {
            eprintln!("error: {e} (from {WORKERS_ENV})");
            std::process::exit(2);
        }
        _ => {}
    }
    let (out, code) = wsuper_cli::cli::main_with_args(std::env::args_os());
    if code == 2 {
        eprint!("{out}");
    } else {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.as_bytes());
    }
    std::process::exit(code);
}
