//! Harmonic oscillator `-(1/2) d^2/dx^2 + (1/2) omega^2 x^2` confined to
//! `[-x_c, x_c]`, solved in the sine basis of the infinite square well.
//!
//! With `omega = 1` the unconfined energies are `n + 1/2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, neg_rho_ln_rho, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig {
    pub x_c: f64,
    pub basis_size: usize,
    pub omega: f64,
}

impl BoxConfig {
    pub fn new(x_c: f64) -> Self {
        Self {
            x_c,
            basis_size: 200,
            omega: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_c > 0.0 && self.x_c.is_finite()) {
            return Err(Error::InvalidConfig(format!("x_c must be positive, got {}", self.x_c)));
        }
        if self.basis_size == 0 {
            return Err(Error::InvalidConfig("basis_size must be positive".into()));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidConfig("omega must be positive".into()));
        }
        Ok(())
    }

    fn length(&self) -> f64 {
        2.0 * self.x_c
    }
}

/// `<k|x^2|l>` for the box basis on `[-L/2, L/2]`, `k, l >= 1`.
pub fn box_x2_element(length: f64, k: usize, l: usize) -> f64 {
    let l2 = length * length;
    if k == l {
        let kf = k as f64;
        l2 * (1.0 / 12.0 - 1.0 / (2.0 * kf * kf * PI * PI))
    } else if (k + l) % 2 == 0 {
        let (kf, lf) = (k as f64, l as f64);
        let d = kf * kf - lf * lf;
        8.0 * l2 * kf * lf / (PI * PI * d * d)
    } else {
        0.0
    }
}

/// Orthonormal box function `k >= 1` at `x`, zero outside the box.
pub fn box_function(x_c: f64, k: usize, x: f64) -> f64 {
    if x.abs() > x_c {
        return 0.0;
    }
    (k as f64 * PI * (x + x_c) / (2.0 * x_c)).sin() / x_c.sqrt()
}

pub fn box_hamiltonian(config: &BoxConfig) -> DMatrix<f64> {
    let n = config.basis_size;
    let length = config.length();
    let w = 0.5 * config.omega * config.omega;
    DMatrix::from_fn(n, n, |i, j| {
        let (k, l) = (i + 1, j + 1);
        let kinetic = if k == l { 0.5 * (k as f64 * PI / length).powi(2) } else { 0.0 };
        kinetic + w * box_x2_element(length, k, l)
    })
}

/// Eigenpairs of the confined oscillator, ascending in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpectrum {
    pub config: BoxConfig,
    pub eigenvalues: Vec<f64>,
    /// Column `n` holds the sine-basis coefficients of state `n`.
    pub coefficients: DMatrix<f64>,
}

impl BoxSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n >= self.len() {
            return Err(Error::StateOutOfRange { index: n, size: self.len() });
        }
        Ok(())
    }

    /// `psi_n(x)`; the sines are generated by the Chebyshev recurrence.
    pub fn psi(&self, n: usize, x: f64) -> f64 {
        let x_c = self.config.x_c;
        if x.abs() >= x_c {
            return 0.0;
        }
        let theta = PI * (x + x_c) / (2.0 * x_c);
        let two_cos = 2.0 * theta.cos();
        let (mut prev, mut cur) = (0.0, theta.sin());
        let mut sum = 0.0;
        for k in 0..self.len() {
            sum += self.coefficients[(k, n)] * cur;
            let next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }
        sum / x_c.sqrt()
    }

    pub fn density(&self, n: usize, x: f64) -> f64 {
        let v = self.psi(n, x);
        v * v
    }
}

pub fn cho_solve(config: &BoxConfig) -> Result<BoxSpectrum> {
    config.validate()?;
    let h = box_hamiltonian(config);
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..config.basis_size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut coefficients = DMatrix::zeros(config.basis_size, config.basis_size);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if lead < 0.0 {
            v.neg_mut();
        }
        coefficients.set_column(col, &v);
    }
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::EigensolverFailure("non-finite box eigenvalue".into()));
    }
    Ok(BoxSpectrum {
        config: *config,
        eigenvalues,
        coefficients,
    })
}

pub fn box_shannon_x(spectrum: &BoxSpectrum, n: usize, quad: &QuadratureConfig) -> Result<f64> {
    spectrum.check(n)?;
    let x_c = spectrum.config.x_c;
    integrate(|x| neg_rho_ln_rho(spectrum.density(n, x)), -x_c, x_c, quad)
}

pub fn cho_shannon_x(config: &BoxConfig, state_index: usize) -> Result<f64> {
    let spectrum = cho_solve(config)?;
    box_shannon_x(&spectrum, state_index, &QuadratureConfig::default())
}
