//! Problem data: channel gains, demands, power caps, and the cell-UE association.
//!
//! Cells are indexed `0..n`, UEs `0..m`. Matrices are stored row-major with
//! one row per cell, so entry `(i, j)` is the link from cell `i` to UE `j`.

mod topology;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use topology::{
    generate_instance, hexagon_centers, initial_association, CellKind, Layout, PathLossModel,
    PhysicalParams, TopologySpec, RNG_ALGORITHM,
};

macro_rules! vector_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            /// Largest entry, or 0 for an empty vector.
            pub fn max(&self) -> f64 {
                self.0.iter().copied().fold(0.0, f64::max)
            }
        }

        impl std::ops::Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

vector_newtype!(
    /// Transmit power per RU of every cell, in watts.
    PowerVector
);
vector_newtype!(
    /// Fraction of RUs in use at every cell. Entries above 1 are representable
    /// and mean the demand cannot be met.
    LoadVector
);
vector_newtype!(
    /// Linear SINR of every UE.
    SinrVector
);

impl PowerVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!("power[{i}]"), format!("{v} is not a positive finite value")));
        }
        Ok(PowerVector(p))
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PowerVector {
        PowerVector(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl LoadVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!("load[{i}]"), format!("{v} is not a non-negative finite value")));
        }
        Ok(LoadVector(x))
    }

    pub fn zeros(n: usize) -> Self {
        LoadVector(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        LoadVector(vec![value; n])
    }

    pub(crate) fn from_raw(x: Vec<f64>) -> Self {
        LoadVector(x)
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl SinrVector {
    pub(crate) fn from_raw(gamma: Vec<f64>) -> Self {
        SinrVector(gamma)
    }
}

/// Immutable description of one downlink problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    n_cells: usize,
    n_ues: usize,
    gain: Vec<f64>,
    noise_power: f64,
    ru_bandwidth: f64,
    ru_count: u32,
    demand_min: Vec<f64>,
    power_max: Vec<f64>,
    cell_kind: Vec<CellKind>,
}

impl NetworkInstance {
    /// Builds an instance from a row-major `n_cells x n_ues` gain matrix.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_cells: usize,
        n_ues: usize,
        gain: Vec<f64>,
        noise_power: f64,
        ru_bandwidth: f64,
        ru_count: u32,
        demand_min: Vec<f64>,
        power_max: Vec<f64>,
        cell_kind: Vec<CellKind>,
    ) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::invalid("n_cells", "must be positive"));
        }
        if n_ues == 0 {
            return Err(Error::invalid("n_ues", "must be positive"));
        }
        check_len("gain", n_cells * n_ues, gain.len())?;
        check_len("demand_min", n_ues, demand_min.len())?;
        check_len("power_max", n_cells, power_max.len())?;
        check_len("cell_kind", n_cells, cell_kind.len())?;
        if let Some(k) = gain.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::invalid(
                format!("gain[{}][{}]", k / n_ues, k % n_ues),
                format!("{} is not a positive finite gain", gain[k]),
            ));
        }
        positive("noise_power", noise_power)?;
        positive("ru_bandwidth", ru_bandwidth)?;
        if ru_count == 0 {
            return Err(Error::invalid("ru_count", "must be positive"));
        }
        for (j, d) in demand_min.iter().enumerate() {
            positive(&format!("demand_min[{j}]"), *d)?;
        }
        for (i, p) in power_max.iter().enumerate() {
            positive(&format!("power_max[{i}]"), *p)?;
        }
        Ok(NetworkInstance {
            n_cells,
            n_ues,
            gain,
            noise_power,
            ru_bandwidth,
            ru_count,
            demand_min,
            power_max,
            cell_kind,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ues(&self) -> usize {
        self.n_ues
    }

    #[inline]
    pub fn gain(&self, cell: usize, ue: usize) -> f64 {
        self.gain[cell * self.n_ues + ue]
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn ru_bandwidth(&self) -> f64 {
        self.ru_bandwidth
    }

    pub fn ru_count(&self) -> u32 {
        self.ru_count
    }

    /// Total bandwidth `M * B` available to one UE on a fully loaded cell.
    pub fn cell_bandwidth(&self) -> f64 {
        self.ru_count as f64 * self.ru_bandwidth
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand_min
    }

    pub fn power_max(&self) -> &[f64] {
        &self.power_max
    }

    pub fn cell_kind(&self) -> &[CellKind] {
        &self.cell_kind
    }

    /// Same network with a different demand vector.
    pub fn with_demand(&self, demand_min: Vec<f64>) -> Result<Self> {
        check_len("demand_min", self.n_ues, demand_min.len())?;
        for (j, d) in demand_min.iter().enumerate() {
            positive(&format!("demand_min[{j}]"), *d)?;
        }
        Ok(NetworkInstance {
            demand_min,
            ..self.clone()
        })
    }

    /// The cap vector as a power allocation.
    pub fn max_power(&self) -> PowerVector {
        PowerVector(self.power_max.clone())
    }

    /// Checks a power vector against the dimensions and caps of this instance.
    pub fn check_power(&self, p: &PowerVector) -> Result<()> {
        check_len("power", self.n_cells, p.len())?;
        for (i, (v, cap)) in p.iter().zip(&self.power_max).enumerate() {
            if *v > *cap {
                return Err(Error::invalid(format!("power[{i}]"), format!("{v} exceeds cap {cap}")));
            }
        }
        Ok(())
    }
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension {
            what,
            expected,
            actual,
        });
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(field, format!("{v} is not positive")));
    }
    Ok(())
}

/// Binary cell-UE serving matrix. Every UE has at least one serving cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Association {
    n_cells: usize,
    n_ues: usize,
    kappa: Vec<bool>,
}

impl Association {
    /// Builds an association from a row-major `n_cells x n_ues` matrix.
    pub fn new(n_cells: usize, n_ues: usize, kappa: Vec<bool>) -> Result<Self> {
        check_len("association", n_cells * n_ues, kappa.len())?;
        let assoc = Association { n_cells, n_ues, kappa };
        if let Some(j) = (0..n_ues).find(|&j| assoc.serving_cells(j).next().is_none()) {
            return Err(Error::invalid(format!("association column {j}"), "UE has no serving cell"));
        }
        Ok(assoc)
    }

    /// Each UE `j` served only by `serving[j]`.
    pub fn single(n_cells: usize, serving: &[usize]) -> Result<Self> {
        let n_ues = serving.len();
        let mut kappa = vec![false; n_cells * n_ues];
        for (j, &i) in serving.iter().enumerate() {
            if i >= n_cells {
                return Err(Error::invalid(format!("serving[{j}]"), format!("cell {i} out of range")));
            }
            kappa[i * n_ues + j] = true;
        }
        Association::new(n_cells, n_ues, kappa)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ues(&self) -> usize {
        self.n_ues
    }

    #[inline]
    pub fn serves(&self, cell: usize, ue: usize) -> bool {
        self.kappa[cell * self.n_ues + ue]
    }

    /// Cells serving `ue` (the set I_j).
    pub fn serving_cells(&self, ue: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_cells).filter(move |&i| self.serves(i, ue))
    }

    /// UEs served by `cell` (the set J_i).
    pub fn served_ues(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.kappa[cell * self.n_ues..(cell + 1) * self.n_ues];
        row.iter().enumerate().filter(|(_, k)| **k).map(|(j, _)| j)
    }

    pub fn link_count(&self) -> usize {
        self.kappa.iter().filter(|k| **k).count()
    }

    /// Serving links beyond the first one of each UE.
    pub fn jt_link_count(&self) -> usize {
        self.link_count() - self.n_ues
    }

    pub fn is_single_serving(&self) -> bool {
        self.link_count() == self.n_ues
    }

    /// Copy with the link `cell -> ue` switched on.
    pub fn with_link(&self, cell: usize, ue: usize) -> Association {
        let mut next = self.clone();
        next.kappa[cell * self.n_ues + ue] = true;
        next
    }

    /// Zero entries of the matrix in row-major order.
    pub fn absent_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kappa
            .iter()
            .enumerate()
            .filter(|(_, k)| !**k)
            .map(|(idx, _)| (idx / self.n_ues, idx % self.n_ues))
    }

    pub(crate) fn check_dims(&self, inst: &NetworkInstance) -> Result<()> {
        check_len("association rows", inst.n_cells(), self.n_cells)?;
        check_len("association columns", inst.n_ues(), self.n_ues)
    }
}
