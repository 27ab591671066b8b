//! Random instances for property and oracle tests.
#![allow(dead_code)]

use palo_core::coupling::{fixed_point_load, is_feasible, SolveStatus, SolverOptions};
use palo_core::model::{initial_association, Association, CellKind, LoadVector, NetworkInstance, PowerVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NOISE_W: f64 = 7.17e-16;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gains log-uniform over four decades, demands 20..600 kbps. Cell 0 is a
/// macro cell, the rest small cells.
pub fn instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> NetworkInstance {
    let gain = (0..n * m).map(|_| 10f64.powf(rng.random_range(-13.0..-9.0))).collect();
    let demand = (0..m).map(|_| rng.random_range(2e4..6e5)).collect();
    let kinds: Vec<CellKind> = (0..n).map(|i| if i == 0 { CellKind::Macro } else { CellKind::Small }).collect();
    let power_max = kinds
        .iter()
        .map(|k| match k {
            CellKind::Macro => 0.2,
            CellKind::Small => 0.05,
        })
        .collect();
    NetworkInstance::new(n, m, gain, NOISE_W, 180e3, 25, demand, power_max, kinds).unwrap()
}

/// Best-signal association plus each other link with probability `jt`.
pub fn association<R: Rng>(rng: &mut R, inst: &NetworkInstance, jt: f64) -> Association {
    let mut a = initial_association(inst);
    for (i, j) in a.absent_links().collect::<Vec<_>>() {
        if rng.random_bool(jt) {
            a = a.with_link(i, j);
        }
    }
    a
}

/// Power with each entry uniform in `(0.05, 1] * p_max`.
pub fn power<R: Rng>(rng: &mut R, inst: &NetworkInstance) -> PowerVector {
    PowerVector::new(inst.power_max().iter().map(|c| c * rng.random_range(0.05..=1.0)).collect()).unwrap()
}

pub struct Case {
    pub inst: NetworkInstance,
    pub assoc: Association,
    pub power: PowerVector,
    pub load: LoadVector,
}

/// Draws until the load fixed point converges to a feasible point.
pub fn feasible_case<R: Rng>(rng: &mut R, n: usize, m: usize, jt: f64) -> Case {
    let opts = SolverOptions {
        tolerance: 1e-13,
        ..SolverOptions::default()
    };
    loop {
        let inst = instance(rng, n, m);
        let assoc = association(rng, &inst, jt);
        let power = power(rng, &inst);
        let report = fixed_point_load(&inst, &assoc, &power, &LoadVector::zeros(n), &opts);
        if report.status == SolveStatus::Converged && is_feasible(&report.load) {
            return Case {
                inst,
                assoc,
                power,
                load: report.load,
            };
        }
    }
}

/// Random sizes in `1..=max_n` cells and `1..=max_m` UEs.
pub fn sized_case<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, jt: f64) -> Case {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    feasible_case(rng, n, m, jt)
}

pub fn tight() -> SolverOptions {
    SolverOptions {
        tolerance: 1e-13,
        ..SolverOptions::default()
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Smallest factor `s` (to relative 1e-12) with a feasible fixed point at
/// `s * p`, by bisection on a log scale. Feasibility is monotone in `s`.
pub fn boundary_scale(inst: &NetworkInstance, assoc: &Association, p: &PowerVector) -> f64 {
    let feasible = |s: f64| {
        let r = fixed_point_load(inst, assoc, &p.scaled(s), &LoadVector::zeros(inst.n_cells()), &tight());
        r.status == SolveStatus::Converged && is_feasible(&r.load)
    };
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    while !feasible(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    hi
}

/// Feasible case whose optimal uniform scaling factor is `1 / u` with `u`
/// log-uniform in `[1, 50]`.
pub fn scalable_case<R: Rng>(rng: &mut R, n: usize, m: usize, jt: f64) -> Case {
    let inst = instance(rng, n, m);
    let assoc = association(rng, &inst, jt);
    let base = power(rng, &inst);
    let u = 50f64.powf(rng.random_range(0.0..1.0));
    let power = base.scaled(boundary_scale(&inst, &assoc, &base) * u);
    let load = fixed_point_load(&inst, &assoc, &power, &LoadVector::zeros(n), &tight()).load;
    Case { inst, assoc, power, load }
}
