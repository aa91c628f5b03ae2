//! Eigenfunctions in position and momentum space.
//!
//! A state is `psi(x) = sum_m b_m (2 gamma)^(1/4) phi_m(sqrt(2 gamma) x)` where
//! `phi_m` is the orthonormal Hermite function (Gaussian included). Under the
//! unitary Fourier convention `phi_m` maps to `(-i)^m phi_m`, so the momentum
//! amplitude is `psi(p) = sum_m (-i)^m b_m (2 gamma)^(-1/4) phi_m(p / sqrt(2 gamma))`.
//! Every eigenvector has a single parity, which makes `(-i)^m` a global phase
//! times a real sign `(-1)^(m/2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(m: usize) -> Self {
        if m % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    Position,
    Momentum,
}

/// Coefficients below this fraction of the largest one are treated as
/// unoccupied when estimating the support.
const OCCUPATION_FLOOR: f64 = 1e-13;

/// One eigenstate with evaluators for amplitudes, densities and their slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctions {
    pub state_index: usize,
    pub gamma: f64,
    pub coeffs: Vec<f64>,
    pub parity: Parity,
    /// `b_m (-1)^(m/2)`: the real momentum series after removing the global phase.
    momentum_coeffs: Vec<f64>,
    max_occupied: usize,
}

/// Values `phi_0(y) .. phi_{len-1}(y)` of the orthonormal Hermite functions.
///
/// Uses `phi_m = y sqrt(2/m) phi_{m-1} - sqrt((m-1)/m) phi_{m-2}` with the
/// Gaussian folded into `phi_0`, so no factorials or raw Hermite
/// polynomials appear.
pub fn hermite_functions(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * y * out[0];
    }
    for m in 2..out.len() {
        let mf = m as f64;
        out[m] = y * (2.0 / mf).sqrt() * out[m - 1] - ((mf - 1.0) / mf).sqrt() * out[m - 2];
    }
}

impl StateFunctions {
    pub fn new(state_index: usize, gamma: f64, coeffs: Vec<f64>, parity: Parity) -> Self {
        let momentum_coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(m, &b)| if (m / 2) % 2 == 0 { b } else { -b })
            .collect();
        let peak = coeffs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let max_occupied = coeffs
            .iter()
            .rposition(|b| b.abs() > OCCUPATION_FLOOR * peak)
            .unwrap_or(0);
        Self {
            state_index,
            gamma,
            coeffs,
            parity,
            momentum_coeffs,
            max_occupied,
        }
    }

    /// Pure oscillator eigenstate `n` in a basis of `size` states.
    pub fn oscillator(n: usize, gamma: f64, size: usize) -> Self {
        let mut coeffs = vec![0.0; size.max(n + 1)];
        coeffs[n] = 1.0;
        Self::new(n, gamma, coeffs, Parity::of_index(n))
    }

    pub fn max_occupied(&self) -> usize {
        self.max_occupied
    }

    /// Half-width outside which the density is negligible.
    ///
    /// In the scaled variable the outermost occupied Hermite function turns
    /// at `sqrt(2 m + 1)`; eight more units put the envelope far below
    /// double-precision relevance.
    pub fn support(&self, space: Space) -> f64 {
        let y_cut = ((2 * self.max_occupied + 1) as f64).sqrt() + 8.0;
        let scale = (2.0 * self.gamma).sqrt();
        match space {
            Space::Position => y_cut / scale,
            Space::Momentum => y_cut * scale,
        }
    }

    /// Real series `sum c_m sqrt(s) phi_m(t sqrt(s))` and its `t`-derivative.
    ///
    /// Runs the Hermite recurrence in place, keeping only the last two terms.
    fn series(&self, coeffs: &[f64], scale: f64, t: f64) -> (f64, f64) {
        let len = (self.max_occupied + 1).min(coeffs.len());
        let y = t * scale;
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
        let mut value = 0.0;
        let mut slope = 0.0;
        for (m, &c) in coeffs.iter().enumerate().take(len) {
            if m > 0 {
                let mf = m as f64;
                let next = y * (2.0 / mf).sqrt() * cur - ((mf - 1.0) / mf).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            // d phi_m / dy = sqrt(2m) phi_{m-1} - y phi_m
            value += c * cur;
            slope += c * ((2.0 * m as f64).sqrt() * prev - y * cur);
        }
        let norm = scale.sqrt();
        (value * norm, slope * norm * scale)
    }

    /// Zeros of the real amplitude inside `(-support, support)`, ascending.
    ///
    /// Sign changes are located on a grid a quarter of the shortest local
    /// half-wavelength apart and refined by bisection. In the far tails the
    /// series is roundoff around zero, so sign changes where `|psi|` stays
    /// below `1e-12` of its sampled peak are skipped.
    pub fn nodes(&self, space: Space) -> Vec<f64> {
        let cut = self.support(space);
        let scale = match space {
            Space::Position => (2.0 * self.gamma).sqrt(),
            Space::Momentum => 1.0 / (2.0 * self.gamma).sqrt(),
        };
        let k_max = ((2 * self.max_occupied + 1) as f64).sqrt();
        let step = std::f64::consts::PI / (4.0 * k_max) / scale;
        let count = (2.0 * cut / step).ceil() as usize + 1;
        let psi = |t: f64| self.amplitude(space, t).0;
        let grid: Vec<(f64, f64)> = (0..count)
            .map(|i| {
                let t = -cut + 2.0 * cut * i as f64 / (count - 1) as f64;
                (t, psi(t))
            })
            .collect();
        let floor = 1e-12 * grid.iter().fold(0.0f64, |m, g| m.max(g.1.abs()));
        let mut out = Vec::new();
        for w in grid.windows(2) {
            let ((a, fa), (b, fb)) = (w[0], w[1]);
            if fa.abs().max(fb.abs()) < floor {
                continue;
            }
            if fb == 0.0 && fa != 0.0 {
                out.push(b);
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                while hi - lo > 1e-14 * (1.0 + lo.abs()) {
                    let mid = 0.5 * (lo + hi);
                    let fm = psi(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
        }
        out
    }

    pub fn psi_x(&self, x: f64) -> f64 {
        self.psi_x_with_derivative(x).0
    }

    pub fn psi_x_with_derivative(&self, x: f64) -> (f64, f64) {
        self.series(&self.coeffs, (2.0 * self.gamma).sqrt(), x)
    }

    /// Momentum amplitude with the global phase `(-i)^parity` removed.
    pub fn psi_p_real_with_derivative(&self, p: f64) -> (f64, f64) {
        self.series(&self.momentum_coeffs, 1.0 / (2.0 * self.gamma).sqrt(), p)
    }

    pub fn psi_p(&self, p: f64) -> Complex64 {
        let (real, _) = self.psi_p_real_with_derivative(p);
        match self.parity {
            Parity::Even => Complex64::new(real, 0.0),
            Parity::Odd => Complex64::new(0.0, -real),
        }
    }

    /// Real amplitude and its derivative in the chosen space.
    pub fn amplitude(&self, space: Space, t: f64) -> (f64, f64) {
        match space {
            Space::Position => self.psi_x_with_derivative(t),
            Space::Momentum => self.psi_p_real_with_derivative(t),
        }
    }

    pub fn density(&self, space: Space, t: f64) -> f64 {
        let (psi, _) = self.amplitude(space, t);
        psi * psi
    }

    /// `(rho, d rho / dt)` with `rho = psi^2`, `d rho = 2 psi psi'`.
    pub fn density_and_derivative(&self, space: Space, t: f64) -> (f64, f64) {
        let (psi, dpsi) = self.amplitude(space, t);
        (psi * psi, 2.0 * psi * dpsi)
    }
}
