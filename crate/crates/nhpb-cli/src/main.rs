//! Thin CLI over the scan library: subcommands for config-driven scans,
//! figure presets, the validation suite, and manifold spectra.
//!
//! Exit status: 0 on success, 1 when a validation check fails, 2 on config
//! or I/O errors (clap argument errors also exit 2).

use clap::{Parser, Subcommand, ValueEnum};
use nhpb_cli::config::ScanConfig;
use nhpb_cli::dataset::{write_dataset, Format};
use nhpb_cli::presets::figure_preset;
use nhpb_cli::scan::run_scan;
use nhpb_cli::validate::{run_case, CASE_NAMES};
use nhpb_core::eigen::decompose_symmetric;
use nhpb_core::hamiltonian::build_manifold_hamiltonian;
use nhpb_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nhpb",
    version,
    about = "Photon-correlation scans for non-Hermitian blockade models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter scan described by a JSON config file
    Scan {
        /// Path to the scan config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Output directory for scan.<ext> and its sidecar
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Emit a named figure dataset as CSV
    Figure {
        /// Preset name (fig2, fig3, figS1..figS5)
        name: String,
        /// Output directory for <name>.csv and its sidecar
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one validation case, or all of them
    Validate {
        /// Case name, or "all"
        case: String,
    },
    /// Print the complex spectrum of one excitation manifold
    Eig {
        /// Path to a scan config supplying model and parameters
        #[arg(long)]
        config: PathBuf,
        /// Manifold index q
        #[arg(long)]
        manifold: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn read_config(path: &Path) -> Result<ScanConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    ScanConfig::from_json(&text)
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Scan { config, out, format } => {
            let cfg = read_config(&config)?;
            let ds = run_scan(&cfg)?;
            ensure_dir(&out)?;
            let format: Format = format.into();
            let path = out.join(format!("scan.{}", format.extension()));
            write_dataset(&ds, &path, format)?;
            let failed = ds.failed_rows();
            println!("wrote {} rows to {}", ds.rows.len(), path.display());
            if failed > 0 {
                eprintln!("note: {failed} rows failed; see their status column");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { name, out } => {
            let cfg = figure_preset(&name)?;
            let ds = run_scan(&cfg)?;
            ensure_dir(&out)?;
            let path = out.join(format!("{name}.csv"));
            write_dataset(&ds, &path, Format::Csv)?;
            println!("wrote {} rows to {}", ds.rows.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { case } => {
            let names: Vec<&str> =
                if case == "all" { CASE_NAMES.to_vec() } else { vec![case.as_str()] };
            let mut all_passed = true;
            for name in names {
                let report = run_case(name)?;
                for c in &report.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    println!("[{tag}] {} / {}: {}", report.name, c.label, c.detail);
                }
                all_passed &= report.passed();
            }
            if all_passed {
                println!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("validation failed");
                Ok(ExitCode::from(1))
            }
        }
        Command::Eig { config, manifold } => {
            let cfg = read_config(&config)?;
            let base = cfg.validate()?;
            if manifold < 1 || manifold as usize > nhpb_core::fock::Q_MAX {
                return Err(Error::InvalidConfig(format!(
                    "manifold must be in 1..={}, got {manifold}",
                    nhpb_core::fock::Q_MAX
                )));
            }
            let eig = decompose_symmetric(&build_manifold_hamiltonian(&base, manifold))?;
            println!("# manifold {manifold}: index Re Im width");
            for (j, v) in eig.values.iter().enumerate() {
                println!("{j} {} {} {}", v.re, v.im, -2.0 * v.im);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
