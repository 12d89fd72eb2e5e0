use clap::{Args, Parser, Subcommand};
use langevin_mlmc::harness::{self, ExperimentConfig};
use langevin_mlmc::Result;
use std::path::PathBuf;
use std::process::ExitCode;

/// Langevin MLMC experiments. Exit codes: 0 ok, 2 config, 3 divergence, 4 j_cap.
#[derive(Parser)]
#[command(name = "lmc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the configured method; writes report.csv and summary.txt.
    Run(Common),
    /// Pilot-sample levels and fit (alpha, beta, gamma); writes rates.csv and rates.txt.
    Rates(Common),
    /// Transformation invariants and assumption scan; writes checks.csv and scan.csv.
    TransformCheck(Common),
    /// Dump raw endpoints to samples.csv.
    Sample(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(c: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    let out = c.out.clone().unwrap_or_else(|| cfg.output_path.clone());
    Ok((cfg, out))
}

fn go(cmd: &Cmd) -> Result<bool> {
    match cmd {
        Cmd::Run(c) => {
            let (cfg, out) = load(c)?;
            let r = harness::run(&cfg)?;
            harness::write_run(&r, &out)?;
            println!("{}", r.summary.line());
        }
        Cmd::Rates(c) => {
            let (cfg, out) = load(c)?;
            let r = harness::rates(&cfg)?;
            harness::write_rates(&cfg, &r, &out)?;
            println!("{}", r.line());
        }
        Cmd::TransformCheck(c) => {
            let (cfg, out) = load(c)?;
            let r = harness::transform_check(&cfg)?;
            harness::write_transform_check(&r, &out)?;
            for ch in &r.checks {
                println!("{} {} value={:e} threshold={:e}", if ch.pass { "PASS" } else { "FAIL" }, ch.name, ch.value, ch.threshold);
            }
            return Ok(r.all_pass());
        }
        Cmd::Sample(c) => {
            let (cfg, out) = load(c)?;
            let draws = harness::sample(&cfg)?;
            harness::write_sample(&draws, &out)?;
            println!("wrote {} draws", draws.len());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match go(&cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
