use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::Algo;
use super::run::{RunRecord, RunStatus};

/// Seed average for one (demand, algorithm, case) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub demand_bps: f64,
    pub algo: Algo,
    pub case: String,
    pub ok: usize,
    pub infeasible: usize,
    pub diverged: usize,
    pub error: usize,
    /// Means over the ok records; empty when there are none.
    pub mean_energy: Option<f64>,
    pub mean_max_load: Option<f64>,
    pub mean_jt_links: Option<f64>,
    /// Mean of per-seed percent reductions against `baseline`, over seeds
    /// where both runs are ok.
    pub mean_reduction_pct: Option<f64>,
    pub baseline: Option<Algo>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn row(&self, demand_bps: f64, algo: Algo, case: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.demand_bps == demand_bps && r.algo == algo && r.case == case)
    }

    /// Rows of one algorithm and case, in demand order.
    pub fn series(&self, algo: Algo, case: &str) -> Vec<&SummaryRow> {
        self.rows.iter().filter(|r| r.algo == algo && r.case == case).collect()
    }
}

/// Reference algorithm for reductions: `nonjt` for the association
/// optimizers, the matching fixed-power record for `polo_fixed`.
pub fn baseline_of(algo: Algo) -> Option<Algo> {
    match algo {
        Algo::Aolo | Algo::Palo => Some(Algo::Nonjt),
        Algo::PoloFixed => Some(Algo::Fixed),
        Algo::Nonjt | Algo::Fixed => None,
    }
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Groups records by (demand, algorithm, case) and averages over seeds.
///
/// Rows are ordered by demand, then algorithm, then the order in which
/// cases first appear. An empty record list gives an empty summary.
pub fn aggregate(records: &[RunRecord]) -> Summary {
    let mut order: Vec<(f64, Algo, String)> = Vec::new();
    let mut groups: HashMap<(u64, Algo, String), Vec<&RunRecord>> = HashMap::new();
    let mut energies: HashMap<(u64, u64, Algo, String), f64> = HashMap::new();
    for r in records {
        let key = (r.demand_bps.to_bits(), r.algo, r.case.clone());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push((r.demand_bps, r.algo, r.case.clone()));
                Vec::new()
            })
            .push(r);
        if let (RunStatus::Ok, Some(e)) = (r.status, r.energy) {
            energies.insert((r.seed, r.demand_bps.to_bits(), r.algo, r.case.clone()), e);
        }
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let rows = order
        .into_iter()
        .map(|(demand, algo, case)| {
            let group = &groups[&(demand.to_bits(), algo, case.clone())];
            let count = |s: RunStatus| group.iter().filter(|r| r.status == s).count();
            let ok: Vec<&&RunRecord> = group.iter().filter(|r| r.is_ok()).collect();
            let baseline = baseline_of(algo);
            let base_case = if algo == Algo::PoloFixed { case.clone() } else { String::new() };
            let reduction = baseline.and_then(|b| {
                mean(ok.iter().filter_map(|r| {
                    let base = energies.get(&(r.seed, demand.to_bits(), b, base_case.clone()))?;
                    Some(100.0 * (base - r.energy?) / base)
                }))
            });
            SummaryRow {
                demand_bps: demand,
                algo,
                case,
                ok: ok.len(),
                infeasible: count(RunStatus::Infeasible),
                diverged: count(RunStatus::Diverged),
                error: count(RunStatus::Error),
                mean_energy: mean(ok.iter().filter_map(|r| r.energy)),
                mean_max_load: mean(ok.iter().filter_map(|r| r.max_load)),
                mean_jt_links: mean(ok.iter().filter_map(|r| r.jt_links.map(|l| l as f64))),
                mean_reduction_pct: reduction,
                baseline,
            }
        })
        .collect();
    Summary { rows }
}
