use std::process::ExitCode;

use clap::Parser;
use tiktv_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            for r in &report.results {
                let last = r.outcome.last();
                let err = last.rel_error.map(|e| format!("{e:.4e}")).unwrap_or_else(|| "-".into());
                println!(
                    "{}{}: {} iterations, rel_error {}, beta {:.4e}, {:.1}s",
                    r.case.as_deref().map(|c| format!("{c}/")).unwrap_or_default(),
                    r.mode,
                    last.k,
                    err,
                    last.beta,
                    r.wall_time.as_secs_f64()
                );
            }
            println!("results written to {}", report.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tiktv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
