use log::debug;

use super::{aolo, polo, AoloOptions, OptimizerTrace, PoloOptions, RoundRecord};
use crate::coupling::energy;
use crate::error::{Error, Result};
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PaloOutcome {
    pub power: PowerVector,
    pub assoc: Association,
    pub load: LoadVector,
    pub trace: OptimizerTrace,
}

/// Round limit used by [`palo`]: `100 * n * m`.
pub fn round_cap(inst: &NetworkInstance) -> usize {
    100 * inst.n_cells() * inst.n_ues()
}

/// Alternates POLO and AOLO until AOLO leaves the association unchanged.
///
/// Each round runs POLO on `(p, x, κ)`, then AOLO on the scaled power and
/// its load, and carries the resulting power, load and association into the
/// next round. The demand inside `inst` is taken as the floor `d_min`.
pub fn palo(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x: &LoadVector,
    polo_opts: &PoloOptions,
    aolo_opts: &AoloOptions,
) -> Result<PaloOutcome> {
    let limit = round_cap(inst);
    let mut power = p.clone();
    let mut load = x.clone();
    let mut kappa = assoc.clone();
    let mut trace = OptimizerTrace::default();

    loop {
        let energy_before = energy(&power, &load);
        let scaled = polo(inst, &kappa, &power, &load, polo_opts)?;
        let energy_after_polo = energy(&scaled.power, &scaled.load);
        let grown = aolo(inst, &kappa, &scaled.power, &scaled.load, aolo_opts)?;
        let energy_after_aolo = energy(&scaled.power, &grown.load);

        let record = RoundRecord {
            round: trace.rounds.len() + 1,
            energy_before,
            energy_after_polo,
            energy_after_aolo,
            max_load: grown.load.max(),
            beta: scaled.beta,
            links_added: grown.added.len(),
            polo_solves: scaled.solves,
            aolo_solves: grown.solves,
            fixed_point_iterations: scaled.iterations + grown.iterations,
        };
        debug!(
            "palo round {}: energy {:.6e} -> {:.6e} -> {:.6e}, beta {:.6}, +{} links",
            record.round, energy_before, energy_after_polo, energy_after_aolo, record.beta, record.links_added
        );
        trace.rounds.push(record);

        let unchanged = !grown.changed();
        power = scaled.power;
        load = grown.load;
        kappa = grown.assoc;
        if unchanged {
            break;
        }
        if trace.rounds.len() >= limit {
            return Err(Error::RoundCap {
                algorithm: "palo",
                limit,
                trace: Box::new(trace),
            });
        }
    }
    Ok(PaloOutcome {
        power,
        assoc: kappa,
        load,
        trace,
    })
}
