//! SINR and load functions and the load-coupling fixed point.
//!
//! For an association `κ`, power `p` and load `x` the SINR of UE `j` is
//!
//! ```text
//! γ_j = Σ_{i ∈ I_j} p_i g_ij / (Σ_{k ∉ I_j} p_k g_kj x_k + σ²)
//! ```
//!
//! and the load of cell `i` is `x_i = Σ_{j ∈ J_i} d_j / (M B log2(1 + γ_j))`.
//! Their composition is a standard interference function in `x`, so the
//! plain iteration `x ← f(h(x))` reaches its unique fixed point whenever one
//! exists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector, SinrVector};

/// Slack allowed above full load by [`is_feasible`].
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Max-norm bound on the last update.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Any load entry above this stops the iteration as diverged.
    pub divergence_ceiling: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-9,
            max_iterations: 10_000,
            divergence_ceiling: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("solver.tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("solver.max_iterations", "must be at least 1"));
        }
        if !(self.divergence_ceiling > 1.0) {
            return Err(Error::invalid("solver.divergence_ceiling", "must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Diverged,
    IterationCap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointReport {
    pub load: LoadVector,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Max-norm of the last update.
    pub residual: f64,
    /// Whether every update moved all components in one common direction.
    pub monotone: bool,
}

impl FixedPointReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// The load, or an error describing why the iteration stopped.
    pub fn into_result(self) -> Result<FixedPointReport> {
        if self.converged() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// SINR of every UE. A UE's serving cells add up in the numerator.
pub fn sinr(inst: &NetworkInstance, assoc: &Association, p: &PowerVector, x: &LoadVector) -> SinrVector {
    let mut gamma = vec![0.0; inst.n_ues()];
    sinr_into(inst, assoc, p, x, &mut gamma);
    SinrVector::from_raw(gamma)
}

fn sinr_into(inst: &NetworkInstance, assoc: &Association, p: &[f64], x: &[f64], gamma: &mut [f64]) {
    let noise = inst.noise_power();
    for (j, out) in gamma.iter_mut().enumerate() {
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (i, (&pi, &xi)) in p.iter().zip(x).enumerate() {
            let rx = pi * inst.gain(i, j);
            if assoc.serves(i, j) {
                signal += rx;
            } else {
                interference += rx * xi;
            }
        }
        *out = signal / (interference + noise);
    }
}

/// Load of every cell. Not clamped to 1.
pub fn cell_load(inst: &NetworkInstance, assoc: &Association, gamma: &SinrVector) -> LoadVector {
    let mut x = vec![0.0; inst.n_cells()];
    cell_load_into(inst, assoc, gamma, &mut x);
    LoadVector::from_raw(x)
}

fn cell_load_into(inst: &NetworkInstance, assoc: &Association, gamma: &[f64], x: &mut [f64]) {
    let mb = inst.cell_bandwidth();
    let demand = inst.demand();
    // per-UE share first; a JT UE occupies RUs in each of its serving cells
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = assoc
            .served_ues(i)
            .map(|j| demand[j] / (mb * (1.0 + gamma[j]).log2()))
            .sum();
    }
}

/// Load function evaluated with possibly different associations for the SINR
/// and the load sums. Used by the link probe, which mixes the two.
pub(crate) fn load_map_split(
    inst: &NetworkInstance,
    sinr_assoc: &Association,
    load_assoc: &Association,
    p: &PowerVector,
    x: &[f64],
    gamma: &mut [f64],
    out: &mut [f64],
) {
    sinr_into(inst, sinr_assoc, p, x, gamma);
    cell_load_into(inst, load_assoc, gamma, out);
}

/// Load of one cell, computing only the SINRs of the UEs it serves.
pub(crate) fn single_cell_load(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x: &[f64],
    cell: usize,
) -> f64 {
    let noise = inst.noise_power();
    let mb = inst.cell_bandwidth();
    assoc
        .served_ues(cell)
        .map(|j| {
            let mut signal = 0.0;
            let mut interference = 0.0;
            for (i, (&pi, &xi)) in p.iter().zip(x).enumerate() {
                let rx = pi * inst.gain(i, j);
                if assoc.serves(i, j) {
                    signal += rx;
                } else {
                    interference += rx * xi;
                }
            }
            inst.demand()[j] / (mb * (1.0 + signal / (interference + noise)).log2())
        })
        .sum()
}

/// One application of `x ↦ f(h(x, p, κ), κ)`.
pub fn load_map(inst: &NetworkInstance, assoc: &Association, p: &PowerVector, x: &LoadVector) -> LoadVector {
    let mut gamma = vec![0.0; inst.n_ues()];
    let mut out = vec![0.0; inst.n_cells()];
    load_map_split(inst, assoc, assoc, p, x, &mut gamma, &mut out);
    LoadVector::from_raw(out)
}

/// Iterates the load map from `x0` until the update is within tolerance, a
/// load exceeds the divergence ceiling, or the iteration cap is hit.
pub fn fixed_point_load(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x0: &LoadVector,
    opts: &SolverOptions,
) -> FixedPointReport {
    debug_assert_eq!(x0.len(), inst.n_cells());
    let mut x = x0.clone();
    let mut next = vec![0.0; inst.n_cells()];
    let mut gamma = vec![0.0; inst.n_ues()];
    let mut residual = f64::INFINITY;
    let mut direction = 0i8;
    let mut monotone = true;

    for iteration in 1..=opts.max_iterations {
        load_map_split(inst, assoc, assoc, p, &x, &mut gamma, &mut next);
        residual = 0.0;
        let mut diverged = false;
        for (new, old) in next.iter().zip(x.iter()) {
            let delta = new - old;
            residual = f64::max(residual, delta.abs());
            if !(new.is_finite() && *new <= opts.divergence_ceiling) {
                diverged = true;
            }
            // rounding noise is not a direction change
            let noise = 1e-12 * (1.0 + old.abs());
            if delta > noise {
                monotone &= direction >= 0;
                direction = 1;
            } else if delta < -noise {
                monotone &= direction <= 0;
                direction = -1;
            }
        }
        x.as_mut_slice().copy_from_slice(&next);
        if diverged {
            return FixedPointReport {
                load: x,
                iterations: iteration,
                status: SolveStatus::Diverged,
                residual,
                monotone,
            };
        }
        if residual <= opts.tolerance {
            return FixedPointReport {
                load: x,
                iterations: iteration,
                status: SolveStatus::Converged,
                residual,
                monotone,
            };
        }
    }
    FixedPointReport {
        load: x,
        iterations: opts.max_iterations,
        status: SolveStatus::IterationCap,
        residual,
        monotone,
    }
}

/// Converged fixed point or a solver error.
pub fn solve_load(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x0: &LoadVector,
    opts: &SolverOptions,
) -> Result<FixedPointReport> {
    assoc.check_dims(inst)?;
    fixed_point_load(inst, assoc, p, x0, opts).into_result()
}

/// Transmission energy `pᵀx` (the constant RU count is dropped).
pub fn energy(p: &PowerVector, x: &LoadVector) -> f64 {
    p.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

/// No cell above full load, up to [`FEASIBILITY_SLACK`].
pub fn is_feasible(x: &LoadVector) -> bool {
    is_feasible_with(x, FEASIBILITY_SLACK)
}

pub fn is_feasible_with(x: &LoadVector, slack: f64) -> bool {
    x.iter().all(|v| *v <= 1.0 + slack)
}
