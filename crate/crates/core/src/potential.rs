//! Symmetric polynomial double wells `V(x) = alpha x^(2n) - beta x^(2m) (+ h)`.
//!
//! The shift `h` is the depth of the wells measured from `V(0)`, so with the
//! shift applied the minima sit at zero and the barrier top at `h`. For the
//! quartic well (`n = 2`, `m = 1`) this is `beta^2 / (4 alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub alpha: f64,
    pub beta: f64,
    pub n_exp: u32,
    pub m_exp: u32,
    pub include_shift: bool,
}

/// Location of the right-hand minimum and the barrier height above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellGeometry {
    pub x0: f64,
    pub h: f64,
}

/// Non-negative turning points of a classical orbit at fixed energy.
///
/// `inner` is present only when the energy does not exceed the barrier top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub outer: f64,
    pub inner: Option<f64>,
}

impl PotentialSpec {
    /// Quartic double well `alpha x^4 - beta x^2 (+ beta^2 / 4 alpha)`.
    pub fn quartic(alpha: f64, beta: f64, include_shift: bool) -> Result<Self> {
        Self::new(alpha, beta, 2, 1, include_shift)
    }

    pub fn new(alpha: f64, beta: f64, n_exp: u32, m_exp: u32, include_shift: bool) -> Result<Self> {
        let spec = Self {
            alpha,
            beta,
            n_exp,
            m_exp,
            include_shift,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidPotential(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        if self.m_exp < 1 || self.n_exp <= self.m_exp {
            return Err(Error::InvalidPotential(format!(
                "exponents must satisfy n > m >= 1, got n = {}, m = {}",
                self.n_exp, self.m_exp
            )));
        }
        Ok(())
    }

    pub fn is_quartic(&self) -> bool {
        self.n_exp == 2 && self.m_exp == 1
    }

    /// Same potential with the shift switched on or off.
    pub fn with_shift(&self, include_shift: bool) -> Self {
        Self {
            include_shift,
            ..*self
        }
    }

    pub fn geometry(&self) -> WellGeometry {
        if self.beta == 0.0 {
            return WellGeometry { x0: 0.0, h: 0.0 };
        }
        if self.is_quartic() {
            return WellGeometry {
                x0: (self.beta / (2.0 * self.alpha)).sqrt(),
                h: self.beta * self.beta / (4.0 * self.alpha),
            };
        }
        // d/dx = 0  =>  x^(2(n-m)) = m beta / (n alpha)
        let (n, m) = (self.n_exp as f64, self.m_exp as f64);
        let x0 = (m * self.beta / (n * self.alpha)).powf(1.0 / (2.0 * (n - m)));
        let h = self.beta * x0.powi(2 * self.m_exp as i32) - self.alpha * x0.powi(2 * self.n_exp as i32);
        WellGeometry { x0, h }
    }

    /// Barrier height `h` (zero for a single well).
    pub fn barrier_height(&self) -> f64 {
        self.geometry().h
    }

    /// The constant added to `alpha x^(2n) - beta x^(2m)`; zero when the shift is off.
    pub fn offset(&self) -> f64 {
        if self.include_shift {
            self.barrier_height()
        } else {
            0.0
        }
    }

    /// Minimum of `V` in this spec's convention.
    pub fn minimum(&self) -> f64 {
        self.offset() - self.barrier_height()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.alpha * x2.powi(self.n_exp as i32) - self.beta * x2.powi(self.m_exp as i32) + self.offset()
    }

    /// Energy measured from the bottom of the wells.
    pub fn to_shifted_energy(&self, energy: f64) -> f64 {
        energy - self.minimum()
    }

    /// Classical turning points `V(x) = energy` on the half line `x >= 0`.
    ///
    /// `energy` is in this spec's shift convention. The quartic uses a closed
    /// form; other exponents fall back to bracketed bisection.
    pub fn turning_points(&self, energy: f64) -> Result<TurningPoints> {
        let e = self.to_shifted_energy(energy);
        if !(e >= 0.0) {
            return Err(Error::EnergyBelowMinimum {
                energy,
                minimum: self.minimum(),
            });
        }
        let WellGeometry { x0, h } = self.geometry();
        if self.is_quartic() {
            let root = 2.0 * (self.alpha * e).sqrt();
            let outer = ((self.beta + root) / (2.0 * self.alpha)).sqrt();
            let inner = (e <= h).then(|| ((self.beta - root).max(0.0) / (2.0 * self.alpha)).sqrt());
            return Ok(TurningPoints { outer, inner });
        }

        let residual = |x: f64| self.evaluate(x) - energy;
        let mut hi = x0.max(1.0);
        while residual(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::RootNotFound("no outer bracket".into()));
            }
        }
        let outer = bisect(residual, x0, hi)?;
        let inner = if e < h {
            Some(bisect(residual, 0.0, x0)?)
        } else if e == h {
            Some(0.0)
        } else {
            None
        };
        Ok(TurningPoints { outer, inner })
    }

    /// Inner turning point only; a single well has none.
    pub fn inner_turning_point(&self, energy: f64) -> Result<Option<f64>> {
        if self.beta == 0.0 {
            return Err(Error::NoBarrier);
        }
        Ok(self.turning_points(energy)?.inner)
    }
}

/// Bisection on a bracket with a sign change; stops at floating-point resolution.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotFound(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
