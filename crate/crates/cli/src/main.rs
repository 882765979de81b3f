use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fatcert::catalog::{builtin_catalog, explain, resolve_catalog, run_catalog, RunOptions, BUILTINS};
use fatcert::fatness::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "fatcert", version, about = "Certify fat covectors on homogeneous bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify every instance of a catalog file or builtin catalog.
    Run {
        /// Path to a JSON catalog, or the name of a builtin catalog.
        catalog: String,
        #[arg(long, default_value = "fatcert-out")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Human-readable report for a certified instance.
    Explain {
        id: String,
        /// Directory holding the certificates.
        #[arg(long, default_value = "fatcert-out")]
        out: PathBuf,
    },
    /// List builtin catalogs and their instances.
    ListBuiltins,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run {
            catalog,
            out,
            tol,
            seed,
            jobs,
        } => {
            if !(tol > 0.0) {
                eprintln!("fatcert: --tol must be positive");
                return ExitCode::from(2);
            }
            let specs = match resolve_catalog(&catalog) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("fatcert: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions {
                out_dir: out,
                tol,
                seed,
                jobs,
            };
            match run_catalog(&specs, &opts) {
                Ok(summary) => {
                    print!("{}", summary.table());
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("fatcert: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Explain { id, out } => match explain(&id, &out) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("fatcert: {e}");
                ExitCode::from(1)
            }
        },
        Command::ListBuiltins => {
            for (name, about) in BUILTINS {
                println!("{name}: {about}");
                for spec in builtin_catalog(name).unwrap_or_default() {
                    let run: Vec<String> = spec.run.iter().map(|c| format!("{c:?}").to_lowercase()).collect();
                    println!("  {:<28} {}", spec.id, run.join(","));
                }
            }
            ExitCode::SUCCESS
        }
    }
}
