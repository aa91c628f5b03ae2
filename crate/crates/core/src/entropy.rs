//! Fisher information, Shannon entropy, Onicescu energy and the
//! Onicescu-Shannon measure of a state, in position and momentum space.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{integrate_many_segments, neg_rho_ln_rho, QuadratureConfig};
use crate::wavefunction::{Space, StateFunctions};

/// Raw moments of one density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceIntegrals {
    pub norm: f64,
    pub fisher: f64,
    pub shannon: f64,
    pub onicescu: f64,
    pub mean: f64,
    pub second_moment: f64,
}

impl SpaceIntegrals {
    pub fn onicescu_shannon(&self) -> f64 {
        (2.0 / 3.0 * self.shannon).exp() * self.onicescu
    }

    pub fn sigma(&self) -> f64 {
        (self.second_moment - self.mean * self.mean).max(0.0).sqrt()
    }
}

/// Every integral needed for the measures of one space, on a shared grid.
///
/// For a real amplitude `(rho')^2 / rho` equals `4 (psi')^2`; the latter is
/// integrated so nodes of `psi` do not produce `0 / 0`. The nodes also serve
/// as breakpoints, where `rho ln rho` is not smooth.
pub fn space_integrals(state: &StateFunctions, space: Space, config: &QuadratureConfig) -> Result<SpaceIntegrals> {
    let cut = state.support(space) * config.domain_cut;
    let mut breaks = vec![-cut];
    for z in state.nodes(space) {
        if z > breaks[breaks.len() - 1] + 1e-12 * cut && z < cut {
            breaks.push(z);
        }
    }
    breaks.push(cut);
    let [norm, fisher, shannon, onicescu, mean, second_moment] = integrate_many_segments(
        |t| {
            let (psi, dpsi) = state.amplitude(space, t);
            let rho = psi * psi;
            [rho, 4.0 * dpsi * dpsi, neg_rho_ln_rho(rho), rho * rho, t * rho, t * t * rho]
        },
        &breaks,
        config,
    )?;
    Ok(SpaceIntegrals {
        norm,
        fisher,
        shannon,
        onicescu,
        mean,
        second_moment,
    })
}

pub fn fisher(state: &StateFunctions, space: Space, config: &QuadratureConfig) -> Result<f64> {
    Ok(space_integrals(state, space, config)?.fisher)
}

pub fn shannon(state: &StateFunctions, space: Space, config: &QuadratureConfig) -> Result<f64> {
    Ok(space_integrals(state, space, config)?.shannon)
}

pub fn onicescu(state: &StateFunctions, space: Space, config: &QuadratureConfig) -> Result<f64> {
    Ok(space_integrals(state, space, config)?.onicescu)
}

/// `exp(2 S / 3) E` in one space.
pub fn onicescu_shannon(state: &StateFunctions, space: Space, config: &QuadratureConfig) -> Result<f64> {
    Ok(space_integrals(state, space, config)?.onicescu_shannon())
}

/// Standard deviations `(sigma_x, sigma_p)`.
pub fn uncertainties(state: &StateFunctions, config: &QuadratureConfig) -> Result<(f64, f64)> {
    let x = space_integrals(state, Space::Position, config)?;
    let p = space_integrals(state, Space::Momentum, config)?;
    Ok((x.sigma(), p.sigma()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub fisher_x: f64,
    pub fisher_p: f64,
    pub fisher_net: f64,
    pub shannon_x: f64,
    pub shannon_p: f64,
    pub shannon_total: f64,
    pub onicescu_x: f64,
    pub onicescu_p: f64,
    pub onicescu_net: f64,
    pub os_x: f64,
    pub os_p: f64,
    pub os_net: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
}

impl MeasureSet {
    pub fn from_integrals(x: &SpaceIntegrals, p: &SpaceIntegrals) -> Self {
        let (os_x, os_p) = (x.onicescu_shannon(), p.onicescu_shannon());
        Self {
            fisher_x: x.fisher,
            fisher_p: p.fisher,
            fisher_net: x.fisher * p.fisher,
            shannon_x: x.shannon,
            shannon_p: p.shannon,
            shannon_total: x.shannon + p.shannon,
            onicescu_x: x.onicescu,
            onicescu_p: p.onicescu,
            onicescu_net: x.onicescu * p.onicescu,
            os_x,
            os_p,
            os_net: os_x * os_p,
            sigma_x: x.sigma(),
            sigma_p: p.sigma(),
        }
    }

    /// The net Onicescu-Shannon measure through total entropy and net energy.
    pub fn os_net_from_totals(&self) -> f64 {
        (2.0 / 3.0 * self.shannon_total).exp() * self.onicescu_net
    }

    pub fn uncertainty_product(&self) -> f64 {
        self.sigma_x * self.sigma_p
    }
}

/// Position and momentum integrals plus the derived measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub position: SpaceIntegrals,
    pub momentum: SpaceIntegrals,
    pub measures: MeasureSet,
}

pub fn state_report(state: &StateFunctions, config: &QuadratureConfig) -> Result<StateReport> {
    let position = space_integrals(state, Space::Position, config)?;
    let momentum = space_integrals(state, Space::Momentum, config)?;
    Ok(StateReport {
        position,
        momentum,
        measures: MeasureSet::from_integrals(&position, &momentum),
    })
}

pub fn measure_set(state: &StateFunctions, config: &QuadratureConfig) -> Result<MeasureSet> {
    Ok(state_report(state, config)?.measures)
}
