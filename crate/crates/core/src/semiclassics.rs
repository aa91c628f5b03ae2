//! Barrier penetration, classical phase-space orbits and their areas.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::basis::{diagonalize, SolverConfig, Spectrum};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::quadrature::{integrate, integrate_sqrt_endpoint, QuadratureConfig};
use crate::wavefunction::Space;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingResult {
    pub t_prob: f64,
    pub inner_tp: Option<f64>,
}

/// Probability mass between the inner turning points `[-x_m, x_m]`.
///
/// States above the barrier top have no inner turning point and `T = 0`.
pub fn tunneling_probability(
    spec: &PotentialSpec,
    spectrum: &Spectrum,
    state_index: usize,
    config: &QuadratureConfig,
) -> Result<TunnelingResult> {
    let state = spectrum.state(state_index)?;
    let tp = spec.turning_points(spectrum.energy(state_index))?;
    match tp.inner {
        Some(xm) if xm > 0.0 => {
            let t = integrate(|x| state.density(Space::Position, x), -xm, xm, config)?;
            Ok(TunnelingResult {
                t_prob: t.clamp(0.0, 1.0),
                inner_tp: Some(xm),
            })
        }
        _ => Ok(TunnelingResult {
            t_prob: 0.0,
            inner_tp: None,
        }),
    }
}

/// `int sqrt(E - V) dx` over the allowed set on the half line `x >= 0`.
///
/// That is `[0, x_outer]` before the orbit splits and the right-hand lobe
/// `[x_inner, x_outer]` after.
pub fn phase_area(spec: &PotentialSpec, spectrum: &Spectrum, state_index: usize, config: &QuadratureConfig) -> Result<f64> {
    if state_index >= spectrum.len() {
        return Err(Error::StateOutOfRange {
            index: state_index,
            size: spectrum.len(),
        });
    }
    phase_area_at_energy(spec, spectrum.energy(state_index), config)
}

pub fn phase_area_at_energy(spec: &PotentialSpec, energy: f64, config: &QuadratureConfig) -> Result<f64> {
    let tp = spec.turning_points(energy)?;
    let start = tp.inner.unwrap_or(0.0);
    if !(tp.outer > start) {
        return Ok(0.0);
    }
    integrate_sqrt_endpoint(|x| (energy - spec.evaluate(x)).max(0.0).sqrt(), start, tp.outer, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub x: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub lobe_id: usize,
}

/// Orbit `p = +-sqrt(E - V(x))` sampled uniformly in `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseContour {
    pub energy: f64,
    pub samples: Vec<ContourPoint>,
    pub lobes: usize,
}

impl PhaseContour {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p_plus,p_minus,lobe_id\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                crate::sweep::format_number(s.x),
                crate::sweep::format_number(s.p_plus),
                crate::sweep::format_number(s.p_minus),
                s.lobe_id
            );
        }
        out
    }
}

pub fn phase_contour(spec: &PotentialSpec, spectrum: &Spectrum, state_index: usize, samples: usize) -> Result<PhaseContour> {
    if state_index >= spectrum.len() {
        return Err(Error::StateOutOfRange {
            index: state_index,
            size: spectrum.len(),
        });
    }
    contour_at_energy(spec, spectrum.energy(state_index), samples)
}

pub fn contour_at_energy(spec: &PotentialSpec, energy: f64, samples: usize) -> Result<PhaseContour> {
    if samples < 2 {
        return Err(Error::InvalidConfig("a contour needs at least 2 samples".into()));
    }
    let tp = spec.turning_points(energy)?;
    let intervals: Vec<(f64, f64)> = match tp.inner {
        Some(inner) if inner > 0.0 => vec![(-tp.outer, -inner), (inner, tp.outer)],
        _ => vec![(-tp.outer, tp.outer)],
    };
    let lobes = intervals.len();
    let per_lobe = (samples / lobes).max(2);
    let mut points = Vec::with_capacity(per_lobe * lobes);
    for (lobe_id, (a, b)) in intervals.into_iter().enumerate() {
        for i in 0..per_lobe {
            let x = a + (b - a) * i as f64 / (per_lobe - 1) as f64;
            let p = (energy - spec.evaluate(x)).max(0.0).sqrt();
            points.push(ContourPoint {
                x,
                p_plus: p,
                p_minus: -p,
                lobe_id,
            });
        }
    }
    Ok(PhaseContour {
        energy,
        samples: points,
        lobes,
    })
}

/// Smallest `beta` in `[lo, hi]` at which state `n` drops below the barrier top.
///
/// Bisection on `E_n(beta) - beta^2 / (4 alpha)` in the shifted convention.
pub fn tunneling_onset(alpha: f64, state_index: usize, lo: f64, hi: f64, solver: &SolverConfig, tol: f64) -> Result<f64> {
    let gap = |beta: f64| -> Result<f64> {
        let spec = PotentialSpec::quartic(alpha, beta, true)?;
        let s = diagonalize(&spec, solver)?;
        Ok(s.energy(state_index) - spec.barrier_height())
    };
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::RootNotFound(format!(
            "onset not bracketed by beta in [{lo}, {hi}] (gaps {g_lo}, {g_hi})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if gap(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
