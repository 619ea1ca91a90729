//! `pdcchlab`: closed-form limits and Monte Carlo BLER runs from the shell.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pdcchlab_core::analysis::LimitsReport;
use pdcchlab_core::framing::CpMode;
use pdcchlab_core::harness::campaign::{curve_rows, write_csv};
use pdcchlab_core::harness::{
    required_cnr, resolve_workers, run_bler_point, run_campaign, sweep, CampaignOptions, SimConfig,
};

#[derive(Parser)]
#[command(name = "pdcchlab", version, about = "NR PDCCH link-level simulator")]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true, env = "PDCCHLAB_WORKERS")]
    workers: Option<usize>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Doppler, delay-spread and CP-loss limits of the DMRS lattice.
    Analyze(AnalyzeArgs),
    /// One BLER point.
    Bler {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        cnr: f64,
    },
    /// BLER over the config's CNR grid, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// CNR at which the swept BLER crosses the target.
    RequiredCnr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        target: Option<f64>,
    },
    /// Every experiment of a campaign file; writes `<out>.csv` and `<out>.json`.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, default_value_t = 0)]
    mu: u32,
    #[arg(long, default_value = "normal")]
    cp: CpMode,
    /// CP duration in microseconds; defaults to the CP mode's fraction of T_U.
    #[arg(long)]
    tcp_us: Option<f64>,
    /// Carrier frequencies for the speed conversion (repeatable).
    #[arg(long = "carrier-hz", default_values_t = [700e6, 4e9])]
    carrier_hz: Vec<f64>,
    /// Doppler shift for the time-spacing bound; defaults to the supported maximum.
    #[arg(long)]
    doppler_hz: Option<f64>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn load(path: &Path, seed: Option<u64>) -> Result<SimConfig> {
    let mut cfg = SimConfig::load(path)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let r = LimitsReport::new(a.mu, a.cp, a.tcp_us, &a.carrier_hz, a.doppler_hz)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r)?);
        return Ok(());
    }
    println!("numerology        mu = {}", r.mu);
    println!("useful symbol     T_U = {:.3} us", r.t_u_us);
    println!("cyclic prefix     T_cp = {:.3} us", r.t_cp_us);
    let n = &r.doppler.n_max;
    match n.floor {
        Some(f) => println!("time pilot spacing n_max = {:.4} (floor {f})", n.real),
        None => println!("time pilot spacing n_max = unbounded"),
    }
    println!("max Doppler       f_p = {:.1} Hz", r.doppler.f_p);
    for (fc, v) in &r.doppler.speeds {
        println!("max speed         {v:.0} km/h at {:.0} MHz", fc / 1e6);
    }
    println!("freq pilot spacing m_max = {}", r.delay.m_max);
    println!("max delay spread  tau_max = {:.3} us", r.delay.tau_max_us);
    println!("CP energy loss    {:.3} dB", r.cnr_loss_db);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if cli.workers == Some(0) {
        bail!("--workers must be at least 1");
    }
    let workers = resolve_workers(cli.workers);
    match &cli.command {
        Command::Analyze(a) => analyze(a)?,
        Command::Bler { config, cnr } => {
            let cfg = load(config, cli.seed)?;
            let p = run_bler_point(&cfg, *cnr, workers)?;
            println!(
                "cnr_db={} blocks={} block_errors={} bit_errors={} bler={:.4e} ber={:.4e} wilson_halfwidth={:.2e} seed={} wall_ms={:.0}",
                p.cnr_db, p.blocks, p.block_errors, p.bit_errors, p.bler, p.ber, p.wilson_halfwidth, p.seed, p.wall_ms
            );
        }
        Command::Sweep { config, out } => {
            let cfg = load(config, cli.seed)?;
            let curve = sweep(&cfg, workers)?;
            let name = config
                .file_stem()
                .map_or("sweep".into(), |s| s.to_string_lossy().into_owned());
            write_csv(out, &curve_rows(&name, &curve)).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} points written to {}", curve.points.len(), out.display());
        }
        Command::RequiredCnr { config, target } => {
            let mut cfg = load(config, cli.seed)?;
            if let Some(t) = target {
                cfg.target_bler = *t;
                cfg.validate()?;
            }
            let curve = sweep(&cfg, workers)?;
            for p in &curve.points {
                eprintln!("{:>7.2} dB  bler {:.3e}  ({} blocks)", p.cnr_db, p.bler, p.blocks);
            }
            println!("{}", required_cnr(&curve, cfg.target_bler));
        }
        Command::Campaign { config, out } => {
            let opts = CampaignOptions {
                workers,
                seed: cli.seed,
                out: out.clone(),
            };
            let s = run_campaign(config, &opts)?;
            for e in &s.experiments {
                println!("{}: {}", e.name, e.required_cnr);
            }
            eprintln!("results in {} and {}", s.csv_path.display(), s.json_path.display());
        }
    }
    Ok(())
}
