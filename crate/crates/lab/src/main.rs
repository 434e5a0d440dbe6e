use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use horolab::config::{Experiment, Overrides, RunConfig};
use horolab::report::Status;
use horolab::{run, LabError};

#[derive(Parser)]
#[command(name = "horolab", version, about = "Run horolab experiments and write CSV/JSON reports")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML config layered over the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for `<experiment>.csv` and `<experiment>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Penetration depth around a cycle over log t.
    SpiralLoglaw(Common),
    /// Event rates across a κ sweep.
    SpiralKhintchine(Common),
    /// Orbit approximation of Haar-random points.
    Dioph(Common),
    /// Shadowing of the ray from a vertex over log t.
    ApproxPoint(Common),
    /// Double-coset counts per depth window.
    CosetCount(Common),
    /// Neighbourhood masses and disjointness.
    MeasureBand(Common),
    /// Borel–Cantelli verdicts.
    BcRun(Common),
    /// Geometry validation suites.
    GeomValidate(Common),
}

impl Cmd {
    fn split(self) -> (Experiment, Common) {
        match self {
            Cmd::SpiralLoglaw(c) => (Experiment::SpiralLoglaw, c),
            Cmd::SpiralKhintchine(c) => (Experiment::SpiralKhintchine, c),
            Cmd::Dioph(c) => (Experiment::Dioph, c),
            Cmd::ApproxPoint(c) => (Experiment::ApproxPoint, c),
            Cmd::CosetCount(c) => (Experiment::CosetCount, c),
            Cmd::MeasureBand(c) => (Experiment::MeasureBand, c),
            Cmd::BcRun(c) => (Experiment::BcRun, c),
            Cmd::GeomValidate(c) => (Experiment::GeomValidate, c),
        }
    }
}

fn main() -> ExitCode {
    let (exp, common) = Cli::parse().cmd.split();
    match go(exp, common) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("horolab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn go(exp: Experiment, c: Common) -> Result<u8, LabError> {
    let text = match &c.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| LabError::Invalid(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let ov = Overrides { seed: c.seed, out: c.out.map(|p| p.display().to_string()) };
    let cfg = RunConfig::load(exp, text.as_deref(), &ov)?;
    if c.dry_run {
        print!("{}", cfg.to_toml());
        return Ok(0);
    }
    let rep = run(&cfg)?;
    let dir = PathBuf::from(cfg.out.clone().unwrap_or_else(|| "out".into()));
    let (csv, json) = rep.write(&dir)?;
    for ch in &rep.summary.checks {
        println!("{} {}: {}", if ch.pass { "ok  " } else { "FAIL" }, ch.name, ch.detail);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(match rep.summary.status {
        Status::Ok => 0,
        Status::Inconclusive => 3,
    })
}
