use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use valcalc::suite::{
    human_table, render, run_suite, value_table, DimRange, Format, Suite, SuiteConfig, TableKind,
};

/// Exact verification of highest weight valuations and their operators.
#[derive(Parser)]
#[command(name = "valcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite over a parameter grid.
    Verify {
        /// hwv, rumin, pairing, transfer, fourier, lefschetz, hodge-riemann, ledger or all
        suite: Suite,
        /// Dimension or inclusive range, e.g. `4` or `2..6`.
        #[arg(long)]
        n: DimRange,
        #[arg(long)]
        r: Option<u8>,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i8>,
        #[arg(long = "m-max")]
        m_max: u32,
        /// json or csv. Without it, stdout gets a text table.
        #[arg(long)]
        format: Option<Format>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to VALCALC_JOBS, then the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print certified constants: pairing, fourier or lefschetz.
    Table {
        kind: TableKind,
        #[arg(long)]
        n: DimRange,
        #[arg(long = "m-max")]
        m_max: u32,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("valcalc: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify {
            suite,
            n,
            r,
            k,
            m_max,
            format,
            out,
            jobs,
        } => {
            let cfg = SuiteConfig {
                suite,
                n,
                r,
                k,
                m_max,
                format: format.unwrap_or_default(),
                out: out.clone(),
                jobs,
            };
            let report = match run_suite(&cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match (&out, format) {
                (Some(path), _) => {
                    if let Err(e) = std::fs::write(path, render(&report, cfg.format)) {
                        return fail(format!("{}: {e}", path.display()));
                    }
                    eprintln!(
                        "{} passed, {} failed",
                        report.summary.pass, report.summary.fail
                    );
                }
                (None, Some(f)) => emit(&format!("{}\n", render(&report, f))),
                (None, None) => emit(&human_table(&report)),
            }
            for it in report.failures() {
                eprintln!(
                    "FAIL {:?} {} {}: {}",
                    it.id, it.suite, it.check, it.computed
                );
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Table { kind, n, m_max } => {
            let rows = match value_table(kind, n, m_max) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let mut text = format!("{:>2} {:>2} {:>3} {:>3}  value\n", "n", "r", "k", "m");
            let mut ok = true;
            for (id, v) in rows {
                ok &= !v.starts_with("FAILED");
                text += &format!("{:>2} {:>2} {:>3} {:>3}  {v}\n", id.n, id.r, id.k, id.m);
            }
            emit(&text);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
