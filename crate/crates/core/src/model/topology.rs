//! Randomized hexagonal macro/small-cell layouts and their channel gains.
//!
//! Macro sites sit on a hexagonal grid enumerated ring by ring from the
//! origin (centre site first, then ring 1, ...). Small cells and UEs are
//! dropped uniformly inside the Voronoi hexagon of their macro site. Gains
//! combine the log-distance path loss of the serving-cell kind with an
//! independent log-normal shadowing term per (cell, UE) link.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Association, NetworkInstance};
use crate::error::{Error, Result};

/// Generator behind every random draw; recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Macro,
    Small,
}

/// `PL(dB) = intercept + slope * log10(d / 1 km)` per cell kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossModel {
    pub macro_intercept_db: f64,
    pub macro_slope_db: f64,
    pub small_intercept_db: f64,
    pub small_slope_db: f64,
    /// Distances below this are clamped up to it.
    pub min_distance_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            macro_intercept_db: 128.1,
            macro_slope_db: 37.6,
            small_intercept_db: 140.7,
            small_slope_db: 36.7,
            min_distance_m: 10.0,
        }
    }
}

impl PathLossModel {
    /// Path loss in dB. The constants are the 2 GHz forms, so the carrier
    /// frequency does not enter.
    pub fn path_loss_db(&self, kind: CellKind, distance_m: f64) -> f64 {
        let d_km = distance_m.max(self.min_distance_m) / 1000.0;
        let (a, b) = match kind {
            CellKind::Macro => (self.macro_intercept_db, self.macro_slope_db),
            CellKind::Small => (self.small_intercept_db, self.small_slope_db),
        };
        a + b * d_km.log10()
    }

    fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("path_loss.macro_intercept_db", self.macro_intercept_db),
            ("path_loss.macro_slope_db", self.macro_slope_db),
            ("path_loss.small_intercept_db", self.small_intercept_db),
            ("path_loss.small_slope_db", self.small_slope_db),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, "must be finite"));
            }
        }
        if !(self.min_distance_m.is_finite() && self.min_distance_m > 0.0) {
            return Err(Error::invalid("path_loss.min_distance_m", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologySpec {
    pub macro_count: usize,
    pub small_per_macro: usize,
    pub ues_per_hexagon: usize,
    pub inter_site_distance_m: f64,
    pub carrier_ghz: f64,
    pub shadowing_std_macro_db: f64,
    pub shadowing_std_small_db: f64,
    pub rng_seed: u64,
    pub path_loss: PathLossModel,
}

impl Default for TopologySpec {
    fn default() -> Self {
        TopologySpec {
            macro_count: 7,
            small_per_macro: 2,
            ues_per_hexagon: 30,
            inter_site_distance_m: 500.0,
            carrier_ghz: 2.0,
            shadowing_std_macro_db: 6.0,
            shadowing_std_small_db: 3.0,
            rng_seed: 0,
            path_loss: PathLossModel::default(),
        }
    }
}

impl TopologySpec {
    pub fn validate(&self) -> Result<()> {
        if self.macro_count == 0 {
            return Err(Error::invalid("topology.macro_count", "must be positive"));
        }
        if self.ues_per_hexagon == 0 {
            return Err(Error::invalid("topology.ues_per_hexagon", "must be positive"));
        }
        if !(self.inter_site_distance_m.is_finite() && self.inter_site_distance_m > 0.0) {
            return Err(Error::invalid("topology.inter_site_distance_m", "must be positive"));
        }
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return Err(Error::invalid("topology.carrier_ghz", "must be positive"));
        }
        for (field, v) in [
            ("topology.shadowing_std_macro_db", self.shadowing_std_macro_db),
            ("topology.shadowing_std_small_db", self.shadowing_std_small_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, "must be non-negative"));
            }
        }
        self.path_loss.validate()
    }

    pub fn n_cells(&self) -> usize {
        self.macro_count * (1 + self.small_per_macro)
    }

    pub fn n_ues(&self) -> usize {
        self.macro_count * self.ues_per_hexagon
    }
}

/// Link-budget constants shared by every generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalParams {
    pub ru_bandwidth_hz: f64,
    pub ru_count: u32,
    pub noise_density_dbm_per_hz: f64,
    pub macro_power_max_mw: f64,
    pub small_power_max_mw: f64,
    /// Per-UE demand floor in bits/s.
    pub demand_bps: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            ru_bandwidth_hz: 180e3,
            ru_count: 25,
            noise_density_dbm_per_hz: -174.0,
            macro_power_max_mw: 200.0,
            small_power_max_mw: 50.0,
            demand_bps: 300e3,
        }
    }
}

impl PhysicalParams {
    /// Noise power over one RU, in watts.
    pub fn noise_power_w(&self) -> f64 {
        10f64.powf(self.noise_density_dbm_per_hz / 10.0) * 1e-3 * self.ru_bandwidth_hz
    }

    pub fn power_max_w(&self, kind: CellKind) -> f64 {
        match kind {
            CellKind::Macro => self.macro_power_max_mw * 1e-3,
            CellKind::Small => self.small_power_max_mw * 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("physical.ru_bandwidth_hz", self.ru_bandwidth_hz),
            ("physical.macro_power_max_mw", self.macro_power_max_mw),
            ("physical.small_power_max_mw", self.small_power_max_mw),
            ("physical.demand_bps", self.demand_bps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("{v} is not positive")));
            }
        }
        if self.ru_count == 0 {
            return Err(Error::invalid("physical.ru_count", "must be positive"));
        }
        if !self.noise_density_dbm_per_hz.is_finite() {
            return Err(Error::invalid("physical.noise_density_dbm_per_hz", "must be finite"));
        }
        Ok(())
    }
}

/// First `count` sites of a hexagonal grid with spacing `isd`, ring by ring.
pub fn hexagon_centers(count: usize, isd: f64) -> Vec<(f64, f64)> {
    // axial directions, counter-clockwise
    const DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let to_xy = |q: i64, r: i64| {
        (
            isd * (q as f64 + r as f64 / 2.0),
            isd * (3f64.sqrt() / 2.0) * r as f64,
        )
    };
    let mut out = vec![to_xy(0, 0)];
    let mut ring = 1i64;
    while out.len() < count {
        // start at the corner reached by walking `ring` steps along DIRS[4]
        let (mut q, mut r) = (DIRS[4].0 * ring, DIRS[4].1 * ring);
        for dir in DIRS {
            for _ in 0..ring {
                out.push(to_xy(q, r));
                q += dir.0;
                r += dir.1;
            }
        }
        ring += 1;
    }
    out.truncate(count);
    out
}

/// Uniform point inside the Voronoi hexagon of a site with spacing `isd`.
fn sample_in_hexagon<R: Rng>(rng: &mut R, center: (f64, f64), isd: f64) -> (f64, f64) {
    let apothem = isd / 2.0;
    let radius = isd / 3f64.sqrt();
    loop {
        let dx = rng.random_range(-radius..radius);
        let dy = rng.random_range(-radius..radius);
        let inside = (0..6).all(|k| {
            let theta = k as f64 * std::f64::consts::FRAC_PI_3;
            dx * theta.cos() + dy * theta.sin() <= apothem
        });
        if inside {
            return (center.0 + dx, center.1 + dy);
        }
    }
}

/// Site and UE positions of one drop.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub cells: Vec<(f64, f64)>,
    pub kinds: Vec<CellKind>,
    pub ues: Vec<(f64, f64)>,
}

impl Layout {
    /// Cells are ordered macros first, then small cells grouped by parent.
    /// UEs are grouped by hexagon.
    pub fn generate<R: Rng>(spec: &TopologySpec, rng: &mut R) -> Layout {
        let isd = spec.inter_site_distance_m;
        let macros = hexagon_centers(spec.macro_count, isd);
        let mut cells = macros.clone();
        let mut kinds = vec![CellKind::Macro; macros.len()];
        for &c in &macros {
            for _ in 0..spec.small_per_macro {
                cells.push(sample_in_hexagon(rng, c, isd));
                kinds.push(CellKind::Small);
            }
        }
        let mut ues = Vec::with_capacity(spec.n_ues());
        for &c in &macros {
            for _ in 0..spec.ues_per_hexagon {
                ues.push(sample_in_hexagon(rng, c, isd));
            }
        }
        Layout { cells, kinds, ues }
    }

    /// Row-major linear gains with shadowing drawn from `rng`.
    pub fn gains<R: Rng>(&self, spec: &TopologySpec, rng: &mut R) -> Result<Vec<f64>> {
        let shadow = |std: f64| {
            Normal::new(0.0, std).map_err(|e| Error::invalid("shadowing std", e.to_string()))
        };
        let macro_shadow = shadow(spec.shadowing_std_macro_db)?;
        let small_shadow = shadow(spec.shadowing_std_small_db)?;
        let mut gain = Vec::with_capacity(self.cells.len() * self.ues.len());
        for (&(cx, cy), &kind) in self.cells.iter().zip(&self.kinds) {
            for &(ux, uy) in &self.ues {
                let d = (cx - ux).hypot(cy - uy);
                let s = match kind {
                    CellKind::Macro => macro_shadow.sample(rng),
                    CellKind::Small => small_shadow.sample(rng),
                };
                let loss_db = spec.path_loss.path_loss_db(kind, d) + s;
                gain.push(10f64.powf(-loss_db / 10.0));
            }
        }
        Ok(gain)
    }
}

/// Draws one randomized instance. Pure in `(spec, phys)`.
pub fn generate_instance(spec: &TopologySpec, phys: &PhysicalParams) -> Result<NetworkInstance> {
    spec.validate()?;
    phys.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let layout = Layout::generate(spec, &mut rng);
    let gain = layout.gains(spec, &mut rng)?;
    let n = layout.cells.len();
    let m = layout.ues.len();
    let power_max = layout.kinds.iter().map(|&k| phys.power_max_w(k)).collect();
    NetworkInstance::new(
        n,
        m,
        gain,
        phys.noise_power_w(),
        phys.ru_bandwidth_hz,
        phys.ru_count,
        vec![phys.demand_bps; m],
        power_max,
        layout.kinds,
    )
}

/// Best received signal at full power, ties to the lowest cell index.
pub fn initial_association(inst: &NetworkInstance) -> Association {
    let serving: Vec<usize> = (0..inst.n_ues())
        .map(|j| {
            let mut best = 0;
            let mut best_rx = f64::NEG_INFINITY;
            for i in 0..inst.n_cells() {
                let rx = inst.power_max()[i] * inst.gain(i, j);
                if rx > best_rx {
                    best = i;
                    best_rx = rx;
                }
            }
            best
        })
        .collect();
    Association::single(inst.n_cells(), &serving).expect("argmax is always a valid cell")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn path_loss_hand_values() {
        let pl = PathLossModel::default();
        assert!(close(pl.path_loss_db(CellKind::Macro, 1000.0), 128.1));
        assert!(close(pl.path_loss_db(CellKind::Macro, 100.0), 90.5));
        assert!(close(pl.path_loss_db(CellKind::Small, 1000.0), 140.7));
        // clamp at 10 m
        assert_eq!(
            pl.path_loss_db(CellKind::Macro, 1.0),
            pl.path_loss_db(CellKind::Macro, 10.0)
        );
        assert!(pl.path_loss_db(CellKind::Small, 0.0) > 0.0);
    }

    #[test]
    fn default_instance_dimensions() {
        let inst = generate_instance(&TopologySpec::default(), &PhysicalParams::default()).unwrap();
        assert_eq!(inst.n_cells(), 21);
        assert_eq!(inst.n_ues(), 210);
        assert_eq!(inst.cell_kind().iter().filter(|k| **k == CellKind::Macro).count(), 7);
        for i in 0..inst.n_cells() {
            for j in 0..inst.n_ues() {
                let g = inst.gain(i, j);
                assert!(g > 0.0 && g < 1.0);
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let spec = TopologySpec {
            rng_seed: 42,
            ..TopologySpec::default()
        };
        let a = generate_instance(&spec, &PhysicalParams::default()).unwrap();
        let b = generate_instance(&spec, &PhysicalParams::default()).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(
            &TopologySpec {
                rng_seed: 43,
                ..spec
            },
            &PhysicalParams::default(),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_shadowing_gains_depend_only_on_positions() {
        let spec = TopologySpec {
            shadowing_std_macro_db: 0.0,
            shadowing_std_small_db: 0.0,
            ..TopologySpec::default()
        };
        let layout = Layout::generate(&spec, &mut ChaCha8Rng::seed_from_u64(1));
        let a = layout.gains(&spec, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = layout.gains(&spec, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn drops_stay_inside_their_hexagon() {
        let spec = TopologySpec::default();
        let layout = Layout::generate(&spec, &mut ChaCha8Rng::seed_from_u64(9));
        let centers = hexagon_centers(7, spec.inter_site_distance_m);
        let radius = spec.inter_site_distance_m / 3f64.sqrt();
        for (h, c) in centers.iter().enumerate() {
            for u in &layout.ues[h * 30..(h + 1) * 30] {
                assert!((u.0 - c.0).hypot(u.1 - c.1) <= radius + 1e-9);
            }
        }
    }

    #[test]
    fn hexagon_rings() {
        let c = hexagon_centers(19, 1.0);
        assert_eq!(c.len(), 19);
        for p in &c[1..7] {
            assert!((p.0.hypot(p.1) - 1.0).abs() < 1e-12);
        }
        // all distinct
        for a in 0..c.len() {
            for b in a + 1..c.len() {
                assert!((c[a].0 - c[b].0).hypot(c[a].1 - c[b].1) > 0.99);
            }
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let phys = PhysicalParams::default();
        for spec in [
            TopologySpec { macro_count: 0, ..TopologySpec::default() },
            TopologySpec { ues_per_hexagon: 0, ..TopologySpec::default() },
            TopologySpec { inter_site_distance_m: 0.0, ..TopologySpec::default() },
            TopologySpec { inter_site_distance_m: -5.0, ..TopologySpec::default() },
        ] {
            assert!(matches!(generate_instance(&spec, &phys), Err(Error::Invalid { .. })));
        }
    }

    fn tiny(gains: Vec<f64>, pmax: Vec<f64>, m: usize) -> NetworkInstance {
        let n = pmax.len();
        NetworkInstance::new(n, m, gains, 1e-15, 180e3, 25, vec![1e5; m], pmax, vec![CellKind::Macro; n]).unwrap()
    }

    #[test]
    fn initial_association_argmax_and_ties() {
        let inst = tiny(vec![0.1, 0.3], vec![1.0, 1.0], 1);
        let a = initial_association(&inst);
        assert!(a.serves(1, 0) && !a.serves(0, 0));

        let inst = tiny(vec![0.5, 0.2, 0.5], vec![1.0, 1.0, 1.0], 1);
        let a = initial_association(&inst);
        assert_eq!(a.serving_cells(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn initial_association_single_serving_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gains: Vec<f64> = (0..100).map(|_| rng.random_range(1e-12..1e-8)).collect();
        let inst = tiny(gains, vec![0.2, 0.05, 0.05, 0.2, 0.1], 20);
        let a = initial_association(&inst);
        for j in 0..20 {
            let col: usize = (0..5).filter(|&i| a.serves(i, j)).count();
            assert_eq!(col, 1);
            let chosen = a.serving_cells(j).next().unwrap();
            for i in 0..5 {
                assert!(inst.power_max()[chosen] * inst.gain(chosen, j) >= inst.power_max()[i] * inst.gain(i, j));
            }
        }
    }
}
