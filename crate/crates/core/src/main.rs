use anyhow::Context;
use clap::Parser;
use patchvortex::cli::{parse_config, run, Cli};

/// Caps the rayon pool when `PATCHVORTEX_THREADS` is set.
fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("PATCHVORTEX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("PATCHVORTEX_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = configure_threads()
        .and_then(|()| Ok(parse_config(&cli)?))
        .and_then(|cfg| Ok(run(&cfg)?));
    match outcome {
        Ok(status) => std::process::exit(status.code()),
        Err(e) => {
            eprintln!("patchvortex: {e:#}");
            std::process::exit(1);
        }
    }
}
