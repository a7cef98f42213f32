use clap::error::ErrorKind;
use clap::Parser;

use depsent::cli::{run, Cli};

fn main() {
    // Rust ignores SIGPIPE by default, which turns `depsent ... | head`
    // into a panic; restore the conventional die-on-closed-pipe behaviour.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests surface as parse errors but are
            // successful outcomes; real usage mistakes exit with 1.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
