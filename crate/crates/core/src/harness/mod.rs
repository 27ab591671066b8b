//! Seeded scenario sweeps over the optimizers.
//!
//! A [`ScenarioConfig`] crosses seeds with per-UE demands. At each point the
//! harness draws an instance, sets the demand floor to the sweep value and
//! runs the requested algorithms from the best-signal association:
//!
//! * `nonjt`: single-serving power with every cell at full load;
//! * `aolo`: association growth at the `nonjt` power;
//! * `palo`: the POLO/AOLO alternation started from `nonjt`;
//! * `polo_fixed`: POLO from each fixed power case under the `palo`
//!   association, reported next to a `fixed` record for the unscaled power.

mod config;
mod output;
mod run;
mod summary;

pub use config::{Algo, AoloConfig, FixedPowerCase, OutputConfig, PoloConfig, ScenarioConfig, SweepConfig};
pub use output::{write_results, OutputPaths, RECORD_COLUMNS};
pub use run::{run_scenario, scenario_instance, RunRecord, RunStatus};
pub use summary::{aggregate, baseline_of, Summary, SummaryRow};
