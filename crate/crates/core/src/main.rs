use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use epigrr::analysis::find_fixed_points;
use epigrr::grr::{self, Variant};
use epigrr::harness::config::RunConfig;
use epigrr::harness::output::{self, *};
use epigrr::harness::{self, HarnessError};
use epigrr::params::{replicate_seed, rng_stream};
use epigrr::simulator::{simulate_batch, simulate_observed};

#[derive(Parser, Debug)]
#[command(name = "epigrr", version, about = "Spatial SIR simulation and recurrence-rule comparison")]
struct Cli {
    /// Key-value parameter file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base seed; replicate k uses seed + k.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Iterations M.
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Recurrence variant (repeatable).
    #[arg(long, global = true, value_parser = parse_variant)]
    variant: Vec<Variant>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a replicate batch and write the mean trajectory and statistics.
    Simulate {
        /// Iterations at which replicate 0 is dumped agent by agent.
        #[arg(long, value_delimiter = ',')]
        snapshot_at: Vec<usize>,
    },
    /// Write recurrence trajectories.
    Grr,
    /// Print fixed points and their stability as JSON.
    FixedPoints,
    /// Simulate, run the recurrences and report the error ν.
    Compare,
    /// Local-recurrence error over a two-axis parameter grid.
    Surface,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

const DEFAULT_OUT: &str = "out";

fn load(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.params.seed = s;
    }
    if let Some(r) = cli.replicates {
        if r == 0 {
            return Err(HarnessError::Config("--replicates must be >= 1".into()));
        }
        cfg.replicates = r;
    }
    if let Some(m) = cli.iters {
        cfg.params.n_iters = m;
        cfg.surface_iters = m;
    }
    if !cli.variant.is_empty() {
        cfg.variants = cli.variant.clone();
    }
    cfg.params = cfg.params.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> Result<PathBuf, HarnessError> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    output::ensure_dir(&dir)?;
    Ok(dir)
}

fn simulate_cmd(cfg: &RunConfig, dir: &Path, snapshot_at: &[usize]) -> Result<(), HarnessError> {
    let p = &cfg.params;
    write_params(&dir.join(PARAMS_FILE), p)?;
    if !snapshot_at.is_empty() {
        let mut rng = rng_stream(replicate_seed(p.seed, 0));
        let mut result = Ok(());
        simulate_observed(p, &mut rng, |t, pop| {
            if result.is_ok() && snapshot_at.contains(&t) {
                result = write_snapshot(&output::snapshot_path(dir, t), pop);
            }
        });
        result?;
    }
    let batch = simulate_batch(p, cfg.replicates);
    write_trajectory(&dir.join(SIMULATION_FILE), &batch.mean)?;
    write_batch(&dir.join(BATCH_FILE), &batch)?;
    println!(
        "simulated {} replicate(s), M = {}, died out: {}",
        batch.replicates, p.n_iters, batch.died_out
    );
    Ok(())
}

fn grr_cmd(cfg: &RunConfig, dir: &Path) -> Result<(), HarnessError> {
    let p = &cfg.params;
    write_params(&dir.join(PARAMS_FILE), p)?;
    let curves: Vec<_> = cfg
        .variants
        .iter()
        .map(|&v| (v, grr::trajectory(v, p)))
        .collect();
    write_grr_trajectories(&dir.join(GRR_FILE), &curves)?;
    for (v, traj) in &curves {
        let last = traj.last().expect("trajectory includes t = 0");
        println!("{v}: t = {} s = {:.3} i = {:.3} r = {:.3}", last.t, last.s, last.i, last.r);
    }
    Ok(())
}

fn fixed_points_cmd(cfg: &RunConfig, out: Option<&Path>) -> Result<(), HarnessError> {
    let fp = find_fixed_points(&cfg.params);
    if let Some(dir) = out {
        output::ensure_dir(dir)?;
        write_fixed_points(&dir.join(FIXED_POINTS_FILE), &fp)?;
    }
    print!("{}", fixed_points_json(&fp));
    Ok(())
}

fn compare_cmd(cfg: &RunConfig, dir: &Path) -> Result<(), HarnessError> {
    let report = harness::compare(&cfg.params, cfg.replicates, &cfg.variants)?;
    write_params(&dir.join(PARAMS_FILE), &report.params)?;
    write_trajectory(&dir.join(SIMULATION_FILE), &report.batch.mean)?;
    write_batch(&dir.join(BATCH_FILE), &report.batch)?;
    write_errors(&dir.join(ERRORS_FILE), &report.errors)?;
    if !report.curves.is_empty() {
        write_grr_trajectories(&dir.join(GRR_FILE), &report.curves)?;
    }
    write_fixed_points(&dir.join(FIXED_POINTS_FILE), &find_fixed_points(&report.params))?;
    for e in &report.errors {
        println!("{:<9} {:<6} nu = {:.6}", e.state, e.variant, e.nu);
    }
    Ok(())
}

fn surface_cmd(cfg: &RunConfig, dir: &Path) -> Result<(), HarnessError> {
    if cfg.axes.is_empty() {
        return Err(HarnessError::Config(
            "surface needs row_axis/row_values (and optionally col_axis/col_values) in --config"
                .into(),
        ));
    }
    let spec = cfg.sweep();
    let cells = harness::error_surface(&spec)?;
    write_params(&dir.join(PARAMS_FILE), &cfg.params)?;
    write_surface(&dir.join(SURFACE_FILE), &cells)?;
    let flagged = cells.iter().filter(|c| c.flagged()).count();
    println!("{} cell(s), {flagged} flagged", cells.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Simulate { snapshot_at } => simulate_cmd(&cfg, &out_dir(cli)?, snapshot_at),
        Command::Grr => grr_cmd(&cfg, &out_dir(cli)?),
        Command::FixedPoints => fixed_points_cmd(&cfg, cli.out.as_deref()),
        Command::Compare => compare_cmd(&cfg, &out_dir(cli)?),
        Command::Surface => surface_cmd(&cfg, &out_dir(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
