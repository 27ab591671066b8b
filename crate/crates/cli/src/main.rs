//! `palo`: run, validate and smoke-test energy-minimization scenarios.
//!
//! Failures print one line on stderr, `error[<kind>]: <message>`, and exit
//! with status 1 (2 for usage errors).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use palo_core::coupling::{solve_load, SolverOptions};
use palo_core::harness::{aggregate, run_scenario, scenario_instance, write_results, Algo, RunStatus, ScenarioConfig, Summary};
use palo_core::model::{initial_association, CellKind, LoadVector, NetworkInstance};
use palo_core::optimizer::{palo, AoloOptions, PoloOptions};

#[derive(Parser, Debug)]
#[command(name = "palo", version, about = "Load-coupled energy minimization with joint transmission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario sweep and write records, summary and metadata.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check a config file and print the resolved config.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run PALO on a built-in 2-cell, 2-UE instance and print its trace.
    Demo,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Seeds, e.g. `1,2,5` or `1..=15`.
    #[arg(long)]
    seeds: Option<String>,
    /// Per-UE demands in bit/s, e.g. `60e3,120e3`.
    #[arg(long, value_delimiter = ',')]
    demands: Option<Vec<f64>>,
    /// Subset of nonjt, aolo, palo, polo_fixed.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<Algo>>,
    /// POLO power-distance tolerance (W).
    #[arg(long)]
    epsilon: Option<f64>,
    /// AOLO probe rounds per candidate link.
    #[arg(long)]
    tau: Option<usize>,
    /// Worker threads, 0 for all cores.
    #[arg(long, env = "PALO_THREADS")]
    threads: Option<usize>,
}

fn parse_seeds(text: &str) -> anyhow::Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..=") {
            let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty seed range {item}");
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(item.parse().with_context(|| format!("seed {item:?}"))?);
        }
    }
    Ok(seeds)
}

impl ScenarioArgs {
    /// Config file with command-line overrides applied, validated.
    fn resolve(&self) -> anyhow::Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(s) = &self.seeds {
            cfg.seeds = parse_seeds(s).context("invalid seeds")?;
        }
        if let Some(d) = &self.demands {
            cfg.sweep.demands_bps = d.clone();
        }
        if let Some(a) = &self.algos {
            cfg.algorithms = a.clone();
        }
        if let Some(e) = self.epsilon {
            cfg.polo.epsilon = e;
        }
        if let Some(t) = self.tau {
            cfg.aolo.tau = t;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn validate(args: &ScenarioArgs) -> anyhow::Result<()> {
    let cfg = args.resolve()?;
    // instance invariants hold for every seed
    for &seed in &cfg.seeds {
        scenario_instance(&cfg, seed, cfg.sweep.demands_bps[0]).with_context(|| format!("instance for seed {seed}"))?;
    }
    print!("{}", cfg.to_toml_string());
    Ok(())
}

fn print_summary(summary: &Summary) {
    println!(
        "{:>12} {:<10} {:<8} {:>4} {:>6} {:>14} {:>10} {:>8}",
        "demand_bps", "algo", "case", "ok", "infeas", "mean_energy", "reduct_%", "jt_links"
    );
    let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"));
    for r in &summary.rows {
        println!(
            "{:>12} {:<10} {:<8} {:>4} {:>6} {:>14} {:>10} {:>8}",
            r.demand_bps,
            r.algo.as_str(),
            r.case,
            r.ok,
            r.infeasible,
            r.mean_energy.map_or_else(|| "-".to_string(), |e| format!("{e:.6e}")),
            opt(r.mean_reduction_pct, 3),
            opt(r.mean_jt_links, 2),
        );
    }
}

fn run(args: &ScenarioArgs, out: &Path) -> anyhow::Result<()> {
    let cfg = args.resolve()?;
    info!(
        "running {} seeds x {} demands, algorithms {:?}",
        cfg.seeds.len(),
        cfg.sweep.demands_bps.len(),
        cfg.algorithms
    );
    let records = run_scenario(&cfg)?;
    let summary = aggregate(&records);
    let paths = write_results(&records, &summary, &cfg, out)?;
    print_summary(&summary);
    println!("records: {}", paths.records.display());
    println!("summary: {}", paths.summary_json.display());
    let failed: Vec<_> = records
        .iter()
        .filter(|r| matches!(r.status, RunStatus::Diverged | RunStatus::Error))
        .collect();
    if let Some(first) = failed.first() {
        bail!(
            "{} runs failed (first: seed {} demand {} {} {:?})",
            failed.len(),
            first.seed,
            first.demand_bps,
            first.algo,
            first.status
        );
    }
    Ok(())
}

/// Two cells, two UEs: a macro cell close to UE 0 and a small cell close to
/// UE 1, with a strong small-cell link to UE 0.
fn demo_instance() -> palo_core::Result<NetworkInstance> {
    NetworkInstance::new(
        2,
        2,
        vec![3e-10, 1e-12, 1e-9, 1e-11],
        7.2e-16,
        180e3,
        25,
        vec![3e6, 3e6],
        vec![0.2, 0.05],
        vec![CellKind::Macro, CellKind::Small],
    )
}

fn demo() -> anyhow::Result<()> {
    let inst = demo_instance()?;
    let assoc = initial_association(&inst);
    let p = inst.max_power();
    let solver = SolverOptions::default();
    let x = solve_load(&inst, &assoc, &p, &LoadVector::zeros(inst.n_cells()), &solver)?.load;
    let out = palo(&inst, &assoc, &p, &x, &PoloOptions::default(), &AoloOptions::default())?;
    println!("round energy");
    for (k, e) in out.trace.energies().iter().enumerate() {
        println!("{k} {e:.9e}");
    }
    println!(
        "links added {}, fixed-point solves {}, final load {:?}",
        out.trace.links_added(),
        out.trace.fixed_point_solves(),
        out.load.as_slice()
    );
    Ok(())
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    match err.downcast_ref::<palo_core::Error>() {
        Some(palo_core::Error::Invalid { .. } | palo_core::Error::Dimension { .. }) => "invalid",
        Some(palo_core::Error::Config(_)) => "config",
        Some(palo_core::Error::Io { .. }) => "io",
        Some(_) => "solver",
        None => "run",
    }
}

/// One line: nested causes joined by `: `, inner newlines flattened.
fn one_line(err: &anyhow::Error) -> String {
    format!("{err:#}").split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("PALO_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Run { scenario, out } => run(scenario, out),
        Command::Validate { scenario } => validate(scenario),
        Command::Demo => demo(),
    };
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", error_kind(&e), one_line(&e));
            ExitCode::FAILURE
        }
    }
}
