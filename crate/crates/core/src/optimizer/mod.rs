//! Energy optimizers over power and association.
//!
//! * [`polo`] scales all powers down by a common factor found by bisection,
//!   as far as the full-load constraint allows.
//! * [`probe_link`] is the sufficient test for adding one serving link
//!   without raising any cell load.
//! * [`aolo`] adds every link the probe certifies.
//! * [`palo`] alternates the two until the association stops changing.
//! * [`nonjt_fullload_power`] is the single-serving baseline with every
//!   cell at full load.

mod aolo;
mod nonjt;
mod palo;
mod polo;
mod probe;

use serde::{Deserialize, Serialize};

use crate::coupling::SolverOptions;
use crate::error::{Error, Result};

pub use aolo::{aolo, AoloOutcome};
pub use nonjt::{nonjt_fullload_power, NonJtOutcome};
pub use palo::{palo, round_cap, PaloOutcome};
pub use polo::{polo, PoloOutcome};
pub use probe::{probe_link, LinkProbe};

#[derive(Clone, Debug, PartialEq)]
pub struct PoloOptions {
    /// Stop once successive candidate powers are within this euclidean distance (W).
    pub epsilon: f64,
    pub solver: SolverOptions,
}

impl Default for PoloOptions {
    fn default() -> Self {
        PoloOptions {
            epsilon: 1e-6,
            solver: SolverOptions::default(),
        }
    }
}

impl PoloOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::invalid("polo.epsilon", "must be positive"));
        }
        self.solver.validate()
    }
}

/// Order in which AOLO visits the absent links.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateOrder {
    /// By cell, then by UE.
    #[default]
    RowMajor,
    /// Strongest channel gain first; ties keep row-major order.
    DescendingGain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AoloOptions {
    /// Probe rounds per candidate link.
    pub tau: usize,
    pub candidate_order: CandidateOrder,
    pub solver: SolverOptions,
}

impl Default for AoloOptions {
    fn default() -> Self {
        AoloOptions {
            tau: 3,
            candidate_order: CandidateOrder::RowMajor,
            solver: SolverOptions::default(),
        }
    }
}

impl AoloOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::invalid("aolo.tau", "must be at least 1"));
        }
        self.solver.validate()
    }
}

/// One POLO + AOLO round of PALO.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub energy_before: f64,
    pub energy_after_polo: f64,
    pub energy_after_aolo: f64,
    /// Largest cell load at the end of the round.
    pub max_load: f64,
    /// Scaling factor applied by POLO in this round.
    pub beta: f64,
    pub links_added: usize,
    pub polo_solves: usize,
    pub aolo_solves: usize,
    pub fixed_point_iterations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub rounds: Vec<RoundRecord>,
}

impl OptimizerTrace {
    /// Energy at the start followed by the energy after every round.
    pub fn energies(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.rounds.first().map(|r| r.energy_before).into_iter().collect();
        out.extend(self.rounds.iter().map(|r| r.energy_after_aolo));
        out
    }

    pub fn fixed_point_solves(&self) -> usize {
        self.rounds.iter().map(|r| r.polo_solves + r.aolo_solves).sum()
    }

    pub fn links_added(&self) -> usize {
        self.rounds.iter().map(|r| r.links_added).sum()
    }

    /// Energies never increase from one step to the next, up to `slack` relative.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.rounds.iter().all(|r| {
            r.energy_after_polo <= r.energy_before * (1.0 + slack)
                && r.energy_after_aolo <= r.energy_after_polo * (1.0 + slack)
        }) && self
            .rounds
            .windows(2)
            .all(|w| w[1].energy_before <= w[0].energy_after_aolo * (1.0 + slack))
    }
}
