use log::trace;

use super::PoloOptions;
use crate::coupling::{fixed_point_load, is_feasible, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PoloOutcome {
    /// `beta * p` for the last feasible candidate (or the input when none was).
    pub power: PowerVector,
    pub load: LoadVector,
    pub beta: f64,
    pub solves: usize,
    pub iterations: usize,
}

/// Uniform power scale-down by bisection on `beta` in `(0, 1]`.
///
/// `x` must be the converged, feasible fixed point for `(p, assoc)`. Every
/// candidate `beta * p` is solved warm-started from the previous candidate's
/// load. An infeasible fixed point raises the lower bracket, a feasible one
/// lowers the upper bracket. The loop ends when two successive candidate
/// powers are within `epsilon`. A candidate whose iteration diverges is
/// treated as infeasible.
pub fn polo(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x: &LoadVector,
    opts: &PoloOptions,
) -> Result<PoloOutcome> {
    opts.validate()?;
    assoc.check_dims(inst)?;
    if !is_feasible(x) {
        return Err(Error::InfeasibleInput { max_load: x.max() });
    }

    let mut lower = 0.0;
    let mut upper = 1.0;
    let mut best = PoloOutcome {
        power: p.clone(),
        load: x.clone(),
        beta: 1.0,
        solves: 0,
        iterations: 0,
    };
    // p' starts at p + epsilon in every entry
    let mut previous: Vec<f64> = p.iter().map(|v| v + opts.epsilon).collect();
    let mut warm = x.clone();
    let mut solves = 0;
    let mut iterations = 0;

    loop {
        let beta = 0.5 * (lower + upper);
        let candidate = p.scaled(beta);
        let report = fixed_point_load(inst, assoc, &candidate, &warm, &opts.solver);
        solves += 1;
        iterations += report.iterations;
        match report.status {
            SolveStatus::Converged if is_feasible(&report.load) => {
                upper = beta;
                warm = report.load.clone();
                best.power = candidate.clone();
                best.load = report.load;
                best.beta = beta;
            }
            SolveStatus::Converged => {
                lower = beta;
                warm = report.load;
            }
            SolveStatus::Diverged => {
                lower = beta;
                warm = best.load.clone();
            }
            SolveStatus::IterationCap => return Err(report.into_result().unwrap_err()),
        }
        trace!("polo beta={beta:.9} feasible_upper={upper:.9} lower={lower:.9}");

        let step = candidate
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        previous.copy_from_slice(&candidate);
        if step <= opts.epsilon {
            break;
        }
    }
    best.solves = solves;
    best.iterations = iterations;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{energy, solve_load, SolverOptions};
    use crate::model::CellKind;

    fn single(g: f64, noise: f64, d: f64) -> (NetworkInstance, Association) {
        let inst =
            NetworkInstance::new(1, 1, vec![g], noise, 180e3, 25, vec![d], vec![0.2], vec![CellKind::Macro]).unwrap();
        (inst, Association::single(1, &[0]).unwrap())
    }

    #[test]
    fn single_cell_matches_closed_form_beta() {
        let (g, noise, d, pw) = (1e-11, 7e-16, 9e5, 0.2);
        let (inst, a) = single(g, noise, d);
        let p = PowerVector::new(vec![pw]).unwrap();
        let x = solve_load(&inst, &a, &p, &LoadVector::zeros(1), &SolverOptions::default()).unwrap().load;
        let opts = PoloOptions::default();
        let out = polo(&inst, &a, &p, &x, &opts).unwrap();
        let beta_star = noise * (2f64.powf(d / inst.cell_bandwidth()) - 1.0) / (pw * g);
        assert!(beta_star < 1.0);
        // last feasible candidate sits just above the boundary
        assert!(out.beta >= beta_star * (1.0 - 1e-9));
        assert!((out.beta - beta_star) * pw <= opts.epsilon, "{} vs {}", out.beta, beta_star);
        assert!(is_feasible(&out.load));
        assert!(energy(&out.power, &out.load) <= energy(&p, &x));
    }

    #[test]
    fn full_load_input_is_kept() {
        let (g, noise, d) = (1e-11, 7e-16, 9e5);
        let (inst, a) = single(g, noise, d);
        // power that puts the single cell exactly at full load
        let pw = noise * (2f64.powf(d / inst.cell_bandwidth()) - 1.0) / g;
        let p = PowerVector::new(vec![pw]).unwrap();
        let x = solve_load(&inst, &a, &p, &LoadVector::zeros(1), &SolverOptions::default()).unwrap().load;
        assert!((x[0] - 1.0).abs() < 1e-9);
        let opts = PoloOptions {
            epsilon: 1e-9 * pw,
            ..PoloOptions::default()
        };
        let out = polo(&inst, &a, &p, &x, &opts).unwrap();
        assert!(1.0 - out.beta <= 2.0 * opts.epsilon / pw);
        assert!((out.power[0] - pw).abs() <= 2.0 * opts.epsilon);
    }

    #[test]
    fn infeasible_input_rejected() {
        let (inst, a) = single(1e-11, 7e-16, 9e5);
        let p = PowerVector::new(vec![0.2]).unwrap();
        let x = LoadVector::new(vec![1.5]).unwrap();
        assert!(matches!(polo(&inst, &a, &p, &x, &PoloOptions::default()), Err(Error::InfeasibleInput { .. })));
    }
}
