use log::debug;

use crate::coupling::{solve_load, SolveStatus, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector};

/// Relative power tolerance of the outer iteration when the solver tolerance
/// is looser. The returned loads must sit within the feasibility slack of 1.
const POWER_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct NonJtOutcome {
    pub power: PowerVector,
    /// Fixed point at `power`; 1 in every cell that serves a UE.
    pub load: LoadVector,
    pub iterations: usize,
}

/// Load of `cell` at its own power `p_cell` with interference `interference[j]`
/// (noise included) at each served UE.
fn cell_load_at(inst: &NetworkInstance, ues: &[usize], cell: usize, p_cell: f64, interference: &[f64]) -> f64 {
    let mb = inst.cell_bandwidth();
    ues.iter()
        .map(|&j| inst.demand()[j] / (mb * (1.0 + p_cell * inst.gain(cell, j) / interference[j]).log2()))
        .sum()
}

/// Power that brings `cell` exactly to full load against fixed interference.
fn full_load_power(inst: &NetworkInstance, ues: &[usize], cell: usize, interference: &[f64]) -> f64 {
    let mb = inst.cell_bandwidth();
    // power at which one UE alone, with share `fraction` of the RUs, meets its demand
    let single = |j: usize, fraction: f64| {
        interference[j] * (2f64.powf(inst.demand()[j] / (mb * fraction)) - 1.0) / inst.gain(cell, j)
    };
    if let [j] = ues {
        return single(*j, 1.0);
    }
    let k = ues.len() as f64;
    // every term ≤ 1 needs at least `lo`; every term ≤ 1/k is enough at `hi`
    let mut lo = ues.iter().map(|&j| single(j, 1.0)).fold(0.0, f64::max);
    let mut hi = ues.iter().map(|&j| single(j, 1.0 / k)).fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cell_load_at(inst, ues, cell, mid, interference) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Power allocation that puts every non-empty cell at full load under a
/// single-serving association.
///
/// Starting from zero power, each outer step solves, for every cell, the
/// scalar equation `Σ_{j∈J_i} d_j / (MB log2(1 + p_i g_ij / I_j)) = 1` by
/// bisection, with `I_j` the interference of all other non-empty cells at
/// their current power and full load. The power sequence is non-decreasing,
/// so the first entry above its cap proves the demand infeasible. Cells
/// without UEs carry no load; they are set to their cap.
pub fn nonjt_fullload_power(
    inst: &NetworkInstance,
    assoc: &Association,
    solver: &SolverOptions,
) -> Result<NonJtOutcome> {
    solver.validate()?;
    assoc.check_dims(inst)?;
    if !assoc.is_single_serving() {
        return Err(Error::invalid("association", "non-JT baseline needs exactly one serving cell per UE"));
    }
    let n = inst.n_cells();
    let m = inst.n_ues();
    let served: Vec<Vec<usize>> = (0..n).map(|i| assoc.served_ues(i).collect()).collect();
    let serving: Vec<usize> = (0..m).map(|j| assoc.serving_cells(j).next().unwrap()).collect();
    let active: Vec<bool> = served.iter().map(|u| !u.is_empty()).collect();

    let mut power = vec![0.0; n];
    let mut interference = vec![0.0; m];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < solver.max_iterations {
        iterations += 1;
        for (j, out) in interference.iter_mut().enumerate() {
            *out = inst.noise_power()
                + (0..n)
                    .filter(|&k| active[k] && k != serving[j])
                    .map(|k| power[k] * inst.gain(k, j))
                    .sum::<f64>();
        }
        let mut change: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in (0..n).filter(|&i| active[i]) {
            let next = full_load_power(inst, &served[i], i, &interference);
            if next > inst.power_max()[i] {
                return Err(Error::InfeasibleDemand {
                    cell: i,
                    required_w: next,
                    cap_w: inst.power_max()[i],
                });
            }
            change = change.max((next - power[i]).abs());
            scale = scale.max(next);
            power[i] = next;
        }
        if change <= solver.tolerance.min(POWER_TOLERANCE) * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Solver {
            status: SolveStatus::IterationCap,
            iterations,
            residual: f64::NAN,
        });
    }
    for i in (0..n).filter(|&i| !active[i]) {
        power[i] = inst.power_max()[i];
    }
    let power = PowerVector::new(power)?;
    let start = LoadVector::from_raw(active.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect());
    let report = solve_load(inst, assoc, &power, &start, solver)?;
    debug!(
        "nonjt: {} outer iterations, load range [{:.12}, {:.12}]",
        iterations,
        report.load.iter().copied().fold(f64::INFINITY, f64::min),
        report.load.max()
    );
    Ok(NonJtOutcome {
        power,
        load: report.load,
        iterations,
    })
}
