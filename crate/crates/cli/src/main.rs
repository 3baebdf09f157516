use clap::error::ErrorKind;
use clap::Parser;

use credal_decal::cli;

fn main() {
    if let Ok(raw) = std::env::var("CREDAL_DECAL_THREADS") {
        let n: usize = match raw.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("CREDAL_DECAL_THREADS must be a positive integer, got {raw:?}");
                std::process::exit(1);
            }
        };
        // only fails if a global pool already exists, which main() precludes
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("rayon pool initialized twice");
    }

    let parsed = cli::Cli::try_parse().unwrap_or_else(|e| {
        // clap exits 2 on usage errors by default; 2 is reserved for solver
        // failures here, so remap usage problems onto the validation code
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
            _ => 1,
        };
        let _ = e.print();
        std::process::exit(code);
    });

    if let Err(e) = cli::run(parsed) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
