use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ghost_opa_cli::{load_config, run, write_atomic, CliError, Command};

/// Ghost interference with a multimode parametric amplifier: coincidence
/// patterns, visibility curves, single counts and a Monte Carlo cross-check.
#[derive(Parser, Debug)]
#[command(name = "ghost-opa", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Configuration file of `key = value unit` lines. Defaults to the
    /// reference setup.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set "T=3.6 ns"`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write an SVG plot (pattern, visibility, mc).
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Monte Carlo seed; takes precedence over the `seed` key
    #[arg(long)]
    seed: Option<u64>,
}

fn main_inner(args: &Args) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref(), &args.set, args.seed)?;
    let out = run(args.command, &cfg)?;
    match &args.out {
        Some(path) => {
            write_atomic(path, &out.text)?;
            for line in &out.summary {
                println!("{line}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(out.text.as_bytes())
                .and_then(|()| stdout.flush())
            {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                    return Err(CliError::Io {
                        path: "<stdout>".into(),
                        source: e,
                    })
                }
                _ => {}
            }
            for line in &out.summary {
                eprintln!("{line}");
            }
        }
    }
    if let Some(path) = &args.svg {
        match &out.svg {
            Some(svg) => write_atomic(path, svg)?,
            None => eprintln!(
                "warning: {} produces no plot; --svg ignored",
                args.command.name()
            ),
        }
    }
    if out.failed_checks > 0 {
        return Err(CliError::CheckFailed(out.failed_checks));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
