use std::time::Instant;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algo, FixedPowerCase, ScenarioConfig};
use crate::coupling::{energy, is_feasible, solve_load, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{generate_instance, initial_association, Association, LoadVector, NetworkInstance, PowerVector};
use crate::optimizer::{aolo, nonjt_fullload_power, palo, polo, NonJtOutcome, PaloOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// The demand cannot be met within the power caps (or the fixed power
    /// leaves some cell above full load).
    Infeasible,
    Diverged,
    Error,
}

impl RunStatus {
    fn of(err: &Error) -> RunStatus {
        match err {
            Error::InfeasibleDemand { .. } | Error::InfeasibleInput { .. } => RunStatus::Infeasible,
            Error::Solver {
                status: SolveStatus::Diverged,
                ..
            } => RunStatus::Diverged,
            _ => RunStatus::Error,
        }
    }
}

/// One row of the results table. Columns are fixed by the output format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub demand_bps: f64,
    pub algo: Algo,
    /// Fixed-power case label for `fixed` and `polo_fixed`, empty otherwise.
    pub case: String,
    /// `pᵀx` at the final power and load; empty unless ok.
    pub energy: Option<f64>,
    pub max_load: Option<f64>,
    /// Serving links beyond one per UE.
    pub jt_links: Option<usize>,
    /// Load fixed-point solves performed by the algorithm itself.
    pub fp_solves: usize,
    pub wall_ms: f64,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }
}

struct Point<'a> {
    cfg: &'a ScenarioConfig,
    seed: u64,
    demand: f64,
    records: Vec<RunRecord>,
}

struct Success {
    power: PowerVector,
    load: LoadVector,
    assoc: Association,
    solves: usize,
}

impl Point<'_> {
    fn push(&mut self, algo: Algo, case: String, outcome: &Result<Success>, started: Instant) {
        let wall_ms = if self.cfg.output.record_wall_time {
            (started.elapsed().as_secs_f64() * 1e6).round() / 1e3
        } else {
            0.0
        };
        let record = match outcome {
            Ok(s) => RunRecord {
                seed: self.seed,
                demand_bps: self.demand,
                algo,
                case,
                energy: Some(energy(&s.power, &s.load)),
                max_load: Some(s.load.max()),
                jt_links: Some(s.assoc.jt_link_count()),
                fp_solves: s.solves,
                wall_ms,
                status: RunStatus::Ok,
            },
            Err(e) => {
                let status = RunStatus::of(e);
                if status == RunStatus::Infeasible {
                    debug!("seed {} demand {} {algo}{case}: {e}", self.seed, self.demand);
                } else {
                    warn!("seed {} demand {} {algo}{case}: {e}", self.seed, self.demand);
                }
                RunRecord {
                    seed: self.seed,
                    demand_bps: self.demand,
                    algo,
                    case,
                    energy: None,
                    max_load: None,
                    jt_links: None,
                    fp_solves: 0,
                    wall_ms,
                    status,
                }
            }
        };
        self.records.push(record);
    }
}

/// Re-raises a shared upstream failure for each dependent run.
fn upstream<T>(r: &Result<T>) -> Result<&T> {
    r.as_ref().map_err(|e| match e {
        Error::InfeasibleDemand { cell, required_w, cap_w } => Error::InfeasibleDemand {
            cell: *cell,
            required_w: *required_w,
            cap_w: *cap_w,
        },
        Error::InfeasibleInput { max_load } => Error::InfeasibleInput { max_load: *max_load },
        Error::Solver {
            status,
            iterations,
            residual,
        } => Error::Solver {
            status: *status,
            iterations: *iterations,
            residual: *residual,
        },
        other => Error::Config(format!("upstream run failed: {other}")),
    })
}

/// Instance of the scenario for one seed and demand, with `d_min = demand`.
pub fn scenario_instance(cfg: &ScenarioConfig, seed: u64, demand: f64) -> Result<NetworkInstance> {
    let mut topology = cfg.topology.clone();
    topology.rng_seed = seed;
    let mut physical = cfg.physical.clone();
    physical.demand_bps = demand;
    generate_instance(&topology, &physical)
}

fn run_point(cfg: &ScenarioConfig, seed: u64, demand: f64) -> Vec<RunRecord> {
    let mut point = Point {
        cfg,
        seed,
        demand,
        records: Vec::new(),
    };
    let inst = match scenario_instance(cfg, seed, demand) {
        Ok(inst) => inst,
        Err(e) => {
            let err: Result<Success> = Err(e);
            for algo in cfg.algorithms.iter().copied() {
                point.push(algo, String::new(), &err, Instant::now());
            }
            return point.records;
        }
    };
    let assoc0 = initial_association(&inst);
    let polo_opts = cfg.polo_options();
    let aolo_opts = cfg.aolo_options();

    let t = Instant::now();
    let nonjt: Result<NonJtOutcome> = nonjt_fullload_power(&inst, &assoc0, &cfg.solver);
    if cfg.runs(Algo::Nonjt) {
        let out = upstream(&nonjt).map(|o| Success {
            power: o.power.clone(),
            load: o.load.clone(),
            assoc: assoc0.clone(),
            solves: 1,
        });
        point.push(Algo::Nonjt, String::new(), &out, t);
    }

    if cfg.runs(Algo::Aolo) {
        let t = Instant::now();
        let out = upstream(&nonjt).and_then(|b| {
            let a = aolo(&inst, &assoc0, &b.power, &b.load, &aolo_opts)?;
            Ok(Success {
                power: b.power.clone(),
                load: a.load,
                assoc: a.assoc,
                solves: a.solves,
            })
        });
        point.push(Algo::Aolo, String::new(), &out, t);
    }

    let needs_palo = cfg.runs(Algo::Palo) || cfg.runs(Algo::PoloFixed);
    let t = Instant::now();
    let palo_out: Result<PaloOutcome> = if needs_palo {
        upstream(&nonjt).and_then(|b| palo(&inst, &assoc0, &b.power, &b.load, &polo_opts, &aolo_opts))
    } else {
        Err(Error::Config("not requested".into()))
    };
    if cfg.runs(Algo::Palo) {
        let out = upstream(&palo_out).map(|o| Success {
            power: o.power.clone(),
            load: o.load.clone(),
            assoc: o.assoc.clone(),
            solves: o.trace.fixed_point_solves(),
        });
        point.push(Algo::Palo, String::new(), &out, t);
    }

    if cfg.runs(Algo::PoloFixed) {
        for case in &cfg.fixed_power_cases {
            let t = Instant::now();
            let fixed = upstream(&palo_out).and_then(|o| fixed_power_point(&inst, &o.assoc, case, cfg));
            point.push(Algo::Fixed, case.label(), &fixed, t);
            let t = Instant::now();
            let scaled = upstream(&fixed).and_then(|f| {
                let s = polo(&inst, &f.assoc, &f.power, &f.load, &polo_opts)?;
                Ok(Success {
                    power: s.power,
                    load: s.load,
                    assoc: f.assoc.clone(),
                    solves: s.solves,
                })
            });
            point.push(Algo::PoloFixed, case.label(), &scaled, t);
        }
    }
    point.records
}

/// Load at a fixed per-kind power under `assoc`; infeasible when a cell
/// exceeds full load.
fn fixed_power_point(inst: &NetworkInstance, assoc: &Association, case: &FixedPowerCase, cfg: &ScenarioConfig) -> Result<Success> {
    let power = PowerVector::new(inst.cell_kind().iter().map(|&k| case.power_w(k)).collect())?;
    inst.check_power(&power)?;
    let report = solve_load(inst, assoc, &power, &LoadVector::zeros(inst.n_cells()), &cfg.solver)?;
    if !is_feasible(&report.load) {
        return Err(Error::InfeasibleInput {
            max_load: report.load.max(),
        });
    }
    Ok(Success {
        power,
        load: report.load,
        assoc: assoc.clone(),
        solves: 1,
    })
}

/// Runs every requested algorithm at every (seed, demand) point.
///
/// Points run in parallel on `cfg.threads` workers. Records come back
/// sorted by seed, demand, algorithm and case order, so the output does not
/// depend on scheduling. Per-run failures land in the status column.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let points: Vec<(u64, f64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.sweep.demands_bps.iter().map(move |&d| (s, d)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut records: Vec<RunRecord> = pool.install(|| {
        points
            .par_iter()
            .flat_map_iter(|&(seed, demand)| run_point(cfg, seed, demand))
            .collect()
    });
    // stable, so cases keep their configured order
    records.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then(a.demand_bps.total_cmp(&b.demand_bps))
            .then(a.algo.cmp(&b.algo))
    });
    Ok(records)
}
