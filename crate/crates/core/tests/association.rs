mod common;

use common::{feasible_case, rng, sized_case, tight};
use palo_core::coupling::{energy, fixed_point_load, is_feasible, solve_load, SolveStatus};
use palo_core::model::{initial_association, Association, CellKind, LoadVector, NetworkInstance, PowerVector};
use palo_core::optimizer::{aolo, palo, probe_link, round_cap, AoloOptions, CandidateOrder, PoloOptions};
use proptest::prelude::*;
use rand::Rng;

fn aolo_opts(tau: usize, order: CandidateOrder) -> AoloOptions {
    AoloOptions {
        tau,
        candidate_order: order,
        solver: tight(),
    }
}

fn polo_opts() -> PoloOptions {
    PoloOptions {
        solver: tight(),
        ..PoloOptions::default()
    }
}

/// Demo-style instance: a small cell with a strong link to the macro UE.
fn two_by_two() -> NetworkInstance {
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
    .unwrap()
}

/// Small instance with powers spread log-uniformly over three decades,
/// where the probe fires more often than with near-equal powers.
fn spread_case<R: Rng>(r: &mut R) -> common::Case {
    loop {
        let c = sized_case(r, 3, 4, 0.1);
        let power = PowerVector::new(c.inst.power_max().iter().map(|cap| cap * 10f64.powf(r.random_range(-3.0..0.0))).collect())
            .unwrap();
        let report = fixed_point_load(&c.inst, &c.assoc, &power, &LoadVector::zeros(c.inst.n_cells()), &tight());
        if report.status == SolveStatus::Converged && is_feasible(&report.load) {
            return common::Case {
                power,
                load: report.load,
                ..c
            };
        }
    }
}

#[test]
fn accepted_links_never_raise_loads() {
    let mut r = rng(0x7e02);
    let mut accepted = 0;
    let mut probes = 0;
    while accepted < 200 {
        let c = spread_case(&mut r);
        for (i, j) in c.assoc.absent_links().collect::<Vec<_>>() {
            probes += 1;
            let p = probe_link(&c.inst, &c.assoc, &c.power, &c.load, i, j, 3).unwrap();
            if !p.accepted {
                continue;
            }
            accepted += 1;
            let bigger = c.assoc.with_link(i, j);
            let x = solve_load(&c.inst, &bigger, &c.power, &LoadVector::zeros(c.inst.n_cells()), &tight()).unwrap();
            for k in 0..c.inst.n_cells() {
                assert!(x.load[k] <= c.load[k] + 1e-10, "link ({i},{j}) raised cell {k}: {} > {}", x.load[k], c.load[k]);
            }
        }
        assert!(probes < 200_000, "only {accepted} acceptances in {probes} probes");
    }
}

#[test]
fn probe_accepts_on_demo_instance() {
    let inst = two_by_two();
    let a = initial_association(&inst);
    let p = inst.max_power();
    let x = solve_load(&inst, &a, &p, &LoadVector::zeros(2), &tight()).unwrap().load;
    let out = palo(&inst, &a, &p, &x, &polo_opts(), &aolo_opts(3, CandidateOrder::RowMajor)).unwrap();
    assert!(out.trace.links_added() >= 1);
    assert!(out.assoc.jt_link_count() >= 1);
    assert!(out.trace.is_non_increasing(1e-12));
}

#[test]
fn probe_rejects_bad_links() {
    let inst = two_by_two();
    let a = Association::single(2, &[0, 1]).unwrap();
    let p = inst.max_power();
    let x = LoadVector::filled(2, 0.5);
    assert!(probe_link(&inst, &a, &p, &x, 0, 0, 3).is_err());
    assert!(probe_link(&inst, &a, &p, &x, 2, 0, 3).is_err());
    assert!(probe_link(&inst, &a, &p, &x, 0, 5, 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aolo_only_lowers_loads(seed in any::<u64>(), tau in 1usize..6, gain_order in any::<bool>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(2..=5), r.random_range(2..=8));
        let c = feasible_case(&mut r, n, m, 0.1);
        let order = if gain_order { CandidateOrder::DescendingGain } else { CandidateOrder::RowMajor };
        let out = aolo(&c.inst, &c.assoc, &c.power, &c.load, &aolo_opts(tau, order)).unwrap();
        for k in 0..n {
            prop_assert!(out.load[k] <= c.load[k] + 1e-10);
        }
        // only additions
        for i in 0..n {
            for j in 0..m {
                prop_assert!(!c.assoc.serves(i, j) || out.assoc.serves(i, j));
            }
        }
        prop_assert_eq!(out.assoc.link_count(), c.assoc.link_count() + out.added.len());
        let resolved = solve_load(&c.inst, &out.assoc, &c.power, &LoadVector::zeros(n), &tight()).unwrap();
        prop_assert!(common::max_abs_diff(&resolved.load, &out.load) < 1e-8);
    }

    #[test]
    fn palo_terminates_with_monotone_trace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=5), r.random_range(1..=8));
        let c = feasible_case(&mut r, n, m, 0.0);
        let out = palo(&c.inst, &c.assoc, &c.power, &c.load, &polo_opts(), &aolo_opts(3, CandidateOrder::RowMajor)).unwrap();
        prop_assert!(out.trace.rounds.len() <= round_cap(&c.inst));
        prop_assert!(out.trace.is_non_increasing(1e-12));
        prop_assert!(is_feasible(&out.load));
        let energies = out.trace.energies();
        prop_assert!((energies[energies.len() - 1] - energy(&out.power, &out.load)).abs() <= 1e-15);
        prop_assert!(energies[energies.len() - 1] <= energy(&c.power, &c.load) * (1.0 + 1e-12));
        // the last round added nothing
        prop_assert_eq!(out.trace.rounds.last().unwrap().links_added, 0);
    }
}
