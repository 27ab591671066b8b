use crate::coupling::{load_map_split, single_cell_load};
use crate::error::{Error, Result};
use crate::model::{Association, LoadVector, NetworkInstance, PowerVector};

#[derive(Clone, Debug, PartialEq)]
pub struct LinkProbe {
    pub accepted: bool,
    /// Last probe iterate `x^(k)`.
    pub probe_load: LoadVector,
    /// Probe rounds run, at most `tau`.
    pub rounds: usize,
}

/// Sufficient test that serving `ue` from `cell` as well lowers (weakly)
/// every cell load at the fixed point.
///
/// Starting from the current fixed point `x`, iterate
/// `x^(k) = f(h⁺(x^(k-1)))` where `h⁺` is the SINR with the extra link and
/// `f` the load sums of the current association. The link is accepted at the
/// first `k ≤ tau` where the enlarged load of `cell`, `f⁺_c(h⁺(x^(k)))`, does
/// not exceed `x^(k)_c`.
pub fn probe_link(
    inst: &NetworkInstance,
    assoc: &Association,
    p: &PowerVector,
    x: &LoadVector,
    cell: usize,
    ue: usize,
    tau: usize,
) -> Result<LinkProbe> {
    assoc.check_dims(inst)?;
    if cell >= inst.n_cells() || ue >= inst.n_ues() {
        return Err(Error::invalid("link", format!("({cell}, {ue}) out of range")));
    }
    if assoc.serves(cell, ue) {
        return Err(Error::invalid("link", format!("cell {cell} already serves UE {ue}")));
    }
    let enlarged = assoc.with_link(cell, ue);
    let mut gamma = vec![0.0; inst.n_ues()];
    let mut current = x.as_slice().to_vec();
    let mut next = vec![0.0; inst.n_cells()];

    for k in 1..=tau {
        load_map_split(inst, &enlarged, assoc, p, &current, &mut gamma, &mut next);
        std::mem::swap(&mut current, &mut next);
        if single_cell_load(inst, &enlarged, p, &current, cell) <= current[cell] {
            return Ok(LinkProbe {
                accepted: true,
                probe_load: LoadVector::from_raw(current),
                rounds: k,
            });
        }
    }
    Ok(LinkProbe {
        accepted: false,
        probe_load: LoadVector::from_raw(current),
        rounds: tau,
    })
}
