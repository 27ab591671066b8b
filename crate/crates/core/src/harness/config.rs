use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupling::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{CellKind, PhysicalParams, TopologySpec};
use crate::optimizer::{AoloOptions, CandidateOrder, PoloOptions};

/// Algorithm tag of a run record.
///
/// `Fixed` is not requested directly: it is the fixed-power reference that
/// accompanies every `PoloFixed` record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Nonjt,
    Aolo,
    Palo,
    Fixed,
    PoloFixed,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Nonjt => "nonjt",
            Algo::Aolo => "aolo",
            Algo::Palo => "palo",
            Algo::Fixed => "fixed",
            Algo::PoloFixed => "polo_fixed",
        }
    }

    /// The algorithms a config may request.
    pub const REQUESTABLE: [Algo; 4] = [Algo::Nonjt, Algo::Aolo, Algo::Palo, Algo::PoloFixed];
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algo> {
        Algo::REQUESTABLE
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::invalid("algorithms", format!("unknown algorithm {s:?} (expected nonjt, aolo, palo or polo_fixed)")))
    }
}

/// Per-RU powers for the fixed-power comparison, in mW.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPowerCase {
    pub macro_mw: f64,
    pub small_mw: f64,
}

impl FixedPowerCase {
    /// Label used in the `case` column, e.g. `160/40`.
    pub fn label(&self) -> String {
        format!("{}/{}", self.macro_mw, self.small_mw)
    }

    pub fn power_w(&self, kind: CellKind) -> f64 {
        match kind {
            CellKind::Macro => self.macro_mw * 1e-3,
            CellKind::Small => self.small_mw * 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Per-UE demand values, bits/s.
    pub demands_bps: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            demands_bps: (1..=9).map(|k| 60e3 * k as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoloConfig {
    pub epsilon: f64,
}

impl Default for PoloConfig {
    fn default() -> Self {
        PoloConfig {
            epsilon: PoloOptions::default().epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AoloConfig {
    pub tau: usize,
    pub candidate_order: CandidateOrder,
}

impl Default for AoloConfig {
    fn default() -> Self {
        let d = AoloOptions::default();
        AoloConfig {
            tau: d.tau,
            candidate_order: d.candidate_order,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Measure wall time per run. Off by default so reruns are byte-identical;
    /// when off the `wall_ms` column is 0.
    pub record_wall_time: bool,
}

/// One experiment: every seed crossed with every demand.
///
/// `topology.rng_seed` and `physical.demand_bps` are placeholders; each run
/// replaces them with its own seed and demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algo>,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub topology: TopologySpec,
    pub physical: PhysicalParams,
    pub sweep: SweepConfig,
    pub solver: SolverOptions,
    pub polo: PoloConfig,
    pub aolo: AoloConfig,
    pub output: OutputConfig,
    pub fixed_power_cases: Vec<FixedPowerCase>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seeds: (1..=15).collect(),
            algorithms: Algo::REQUESTABLE.to_vec(),
            threads: 0,
            topology: TopologySpec::default(),
            physical: PhysicalParams::default(),
            sweep: SweepConfig::default(),
            solver: SolverOptions::default(),
            polo: PoloConfig::default(),
            aolo: AoloConfig::default(),
            output: OutputConfig::default(),
            fixed_power_cases: vec![
                FixedPowerCase {
                    macro_mw: 160.0,
                    small_mw: 40.0,
                },
                FixedPowerCase {
                    macro_mw: 120.0,
                    small_mw: 30.0,
                },
            ],
        }
    }
}

impl ScenarioConfig {
    /// Parses and validates a TOML document. Missing keys take their defaults.
    pub fn from_toml_str(text: &str) -> Result<ScenarioConfig> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn polo_options(&self) -> PoloOptions {
        PoloOptions {
            epsilon: self.polo.epsilon,
            solver: self.solver.clone(),
        }
    }

    pub fn aolo_options(&self) -> AoloOptions {
        AoloOptions {
            tau: self.aolo.tau,
            candidate_order: self.aolo.candidate_order,
            solver: self.solver.clone(),
        }
    }

    pub fn runs(&self, algo: Algo) -> bool {
        self.algorithms.contains(&algo)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds", "must not be empty"));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(Error::invalid("seeds", "contains duplicates"));
        }
        if self.sweep.demands_bps.is_empty() {
            return Err(Error::invalid("sweep.demands_bps", "must not be empty"));
        }
        for (k, d) in self.sweep.demands_bps.iter().enumerate() {
            if !(d.is_finite() && *d > 0.0) {
                return Err(Error::invalid(format!("sweep.demands_bps[{k}]"), format!("{d} is not positive")));
            }
        }
        let mut sorted = self.sweep.demands_bps.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("sweep.demands_bps", "contains duplicates"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("algorithms", "must not be empty"));
        }
        if self.algorithms.contains(&Algo::Fixed) {
            return Err(Error::invalid("algorithms", "fixed is emitted with polo_fixed and cannot be requested"));
        }
        if self.algorithms.iter().collect::<BTreeSet<_>>().len() != self.algorithms.len() {
            return Err(Error::invalid("algorithms", "contains duplicates"));
        }
        if self.runs(Algo::PoloFixed) && self.fixed_power_cases.is_empty() {
            return Err(Error::invalid("fixed_power_cases", "polo_fixed needs at least one case"));
        }
        for (k, c) in self.fixed_power_cases.iter().enumerate() {
            for (kind, v, cap) in [
                ("macro_mw", c.macro_mw, self.physical.macro_power_max_mw),
                ("small_mw", c.small_mw, self.physical.small_power_max_mw),
            ] {
                if !(v.is_finite() && v > 0.0 && v <= cap) {
                    return Err(Error::invalid(
                        format!("fixed_power_cases[{k}].{kind}"),
                        format!("{v} is outside (0, {cap}]"),
                    ));
                }
            }
        }
        self.topology.validate()?;
        self.physical.validate()?;
        self.polo_options().validate()?;
        self.aolo_options().validate()
    }
}
