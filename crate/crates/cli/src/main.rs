use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vnlab::lab::{run_config, ReportFormat, RunOptions};
use vnlab::numerics::fit_decay_slope;

#[derive(Parser)]
#[command(name = "vnlab", version, about = "Fourier multiplier and spectral inequality lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for reports (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format (overrides the config).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Base seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run a constant-stability scan; the config must have experiment kind "scan".
    Scan { config: PathBuf },
    /// Fit a log-log line to a two-column `t,value` CSV.
    Fit { series: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

fn read_series(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split([',', '\t']).map(str::trim);
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(format!("{}:{}: expected two columns", path.display(), i + 1));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(t), Ok(v)) => out.push((t, v)),
            // a non-numeric first row is a header
            _ if out.is_empty() && i == 0 => continue,
            _ => return Err(format!("{}:{}: not a number pair: {line}", path.display(), i + 1)),
        }
    }
    Ok(out)
}

fn fit(path: &Path) -> i32 {
    let series = match read_series(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    match fit_decay_slope(&series) {
        Ok(f) => {
            println!("slope,intercept,max_residual");
            println!("{:.16e},{:.16e},{:.16e}", f.slope, f.intercept, f.max_residual);
            0
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            2
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = RunOptions {
        seed: cli.seed,
        workers: cli.workers,
        out_dir: cli.out,
        format: cli.format.map(Into::into),
    };
    let code = match &cli.command {
        Command::Run { config } => {
            log::info!("running {}", config.display());
            run_config(config, &opts, false)
        }
        Command::Scan { config } => {
            log::info!("scanning {}", config.display());
            run_config(config, &opts, true)
        }
        Command::Fit { series } => fit(series),
    };
    ExitCode::from(code as u8)
}
