use log::debug;

use super::{probe_link, AoloOptions, CandidateOrder};
use crate::coupling::solve_load;
use crate::error::Result;
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector};

#[derive(Clone, Debug, PartialEq)]
pub struct AoloOutcome {
    pub assoc: Association,
    pub load: LoadVector,
    /// Accepted links in the order they were added.
    pub added: Vec<(usize, usize)>,
    pub solves: usize,
    pub iterations: usize,
    pub probes: usize,
}

impl AoloOutcome {
    pub fn changed(&self) -> bool {
        !self.added.is_empty()
    }
}

fn candidates(inst: &NetworkInstance, assoc: &Association, order: CandidateOrder) -> Vec<(usize, usize)> {
    let mut links: Vec<(usize, usize)> = assoc.absent_links().collect();
    if order == CandidateOrder::DescendingGain {
        links.sort_by(|a, b| inst.gain(b.0, b.1).total_cmp(&inst.gain(a.0, a.1)));
    }
    links
}

/// Greedy association growth at fixed power.
///
/// Every absent link of the input association is probed once, in
/// `opts.candidate_order`. An accepted link is kept and the fixed point is
/// re-solved under the enlarged association before the next candidate, so
/// each probe starts from a true fixed point.
pub fn aolo(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x: &LoadVector,
    opts: &AoloOptions,
) -> Result<AoloOutcome> {
    opts.validate()?;
    assoc.check_dims(inst)?;
    let mut current = assoc.clone();
    let mut load = x.clone();
    let mut out = AoloOutcome {
        assoc: assoc.clone(),
        load: x.clone(),
        added: Vec::new(),
        solves: 0,
        iterations: 0,
        probes: 0,
    };

    for (cell, ue) in candidates(inst, assoc, opts.candidate_order) {
        let probe = probe_link(inst, &current, p, &load, cell, ue, opts.tau)?;
        out.probes += 1;
        if !probe.accepted {
            continue;
        }
        current = current.with_link(cell, ue);
        // the probe iterate lies above the new fixed point, so this iteration descends
        let report = solve_load(inst, &current, p, &probe.probe_load, &opts.solver)?;
        out.solves += 1;
        out.iterations += report.iterations;
        debug!(
            "aolo: link cell {cell} -> ue {ue} accepted after {} probe rounds, max load {:.6}",
            probe.rounds,
            report.load.max()
        );
        load = report.load;
        out.added.push((cell, ue));
    }
    out.assoc = current;
    out.load = load;
    Ok(out)
}
