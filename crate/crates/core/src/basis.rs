//! Hamiltonian in a scaled harmonic-oscillator number basis.
//!
//! Coordinates are represented with ladder operators,
//! `x = (a + a^dag) / (2 sqrt(gamma))` and `p = i sqrt(gamma) (a^dag - a)`,
//! so that `p^2 + 4 gamma^2 x^2` has eigenvalues `2 gamma (2n + 1)`. The
//! scale `gamma` is picked by minimizing the trace of the Hamiltonian matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::wavefunction::{Parity, StateFunctions};

/// How the basis scale `gamma` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GammaMode {
    /// Minimize the trace over every basis state.
    FullBasis,
    /// Minimize the trace over even number states only.
    EvenParity,
    /// Minimize the trace over odd number states only.
    OddParity,
    Manual(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub basis_size: usize,
    pub gamma_mode: GammaMode,
    /// Extra rows kept while forming operator powers; the retained block is
    /// exact once `pad >= 2 n_exp`.
    pub pad: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            basis_size: 100,
            gamma_mode: GammaMode::FullBasis,
            pad: 4,
        }
    }
}

impl SolverConfig {
    pub fn with_basis_size(basis_size: usize) -> Self {
        Self {
            basis_size,
            ..Self::default()
        }
    }

    /// Default configuration with the padding raised to what `spec` needs.
    pub fn for_potential(spec: &PotentialSpec) -> Self {
        Self {
            pad: 2 * spec.n_exp as usize,
            ..Self::default()
        }
    }

    pub fn validate(&self, spec: &PotentialSpec) -> Result<()> {
        if self.basis_size < 4 {
            return Err(Error::InvalidConfig(format!(
                "basis_size must be at least 4, got {}",
                self.basis_size
            )));
        }
        if self.pad < 2 * spec.n_exp as usize {
            return Err(Error::InvalidConfig(format!(
                "pad must be at least 2 n_exp = {}, got {}",
                2 * spec.n_exp,
                self.pad
            )));
        }
        if let GammaMode::Manual(g) = self.gamma_mode {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidConfig(format!("manual gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

/// Eigenpairs of the truncated Hamiltonian, ascending in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub gamma: f64,
    pub eigenvalues: Vec<f64>,
    /// Column `n` holds the number-basis coefficients of state `n`.
    pub coefficients: DMatrix<f64>,
    pub parities: Vec<Parity>,
    pub shift_included: bool,
    /// Barrier height `h`; shifted and unshifted energies differ by exactly this.
    pub barrier_height: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.eigenvalues[n]
    }

    /// Energy measured from the bottom of the wells (`min V = 0`).
    pub fn shifted_energy(&self, n: usize) -> f64 {
        if self.shift_included {
            self.eigenvalues[n]
        } else {
            self.eigenvalues[n] + self.barrier_height
        }
    }

    /// Energy of `alpha x^4 - beta x^2` without the constant.
    pub fn unshifted_energy(&self, n: usize) -> f64 {
        self.shifted_energy(n) - self.barrier_height
    }

    pub fn state(&self, n: usize) -> Result<StateFunctions> {
        if n >= self.len() {
            return Err(Error::StateOutOfRange {
                index: n,
                size: self.len(),
            });
        }
        let coeffs = self.coefficients.column(n).iter().copied().collect();
        Ok(StateFunctions::new(n, self.gamma, coeffs, self.parities[n]))
    }
}

fn trace_constant(mode: GammaMode, n: f64) -> f64 {
    match mode {
        GammaMode::FullBasis => (2.0 * n * n + 4.0 * n + 3.0) / (n + 1.0),
        GammaMode::EvenParity => 2.0 * n + 1.0,
        GammaMode::OddParity => 2.0 * n + 3.0,
        GammaMode::Manual(_) => unreachable!("manual gamma bypasses the cubic"),
    }
}

/// Positive root of `8 g^3 + 2 beta g - c = 0`.
///
/// The cubic is increasing and convex on `g > 0`, so Newton started right of
/// the root converges monotonically.
pub fn positive_cubic_root(beta: f64, c: f64) -> f64 {
    let f = |g: f64| 8.0 * g * g * g + 2.0 * beta * g - c;
    let mut g = (c / 8.0).cbrt().max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let step = f(g) / (24.0 * g * g + 2.0 * beta);
        let next = g - step;
        if !(next > 0.0) || next >= g {
            break;
        }
        g = next;
        if step.abs() <= 4.0 * f64::EPSILON * g {
            break;
        }
    }
    g
}

/// Basis scale from trace minimization (or the manual value).
pub fn solve_gamma(spec: &PotentialSpec, config: &SolverConfig) -> Result<f64> {
    if let GammaMode::Manual(g) = config.gamma_mode {
        return Ok(g);
    }
    if !(spec.alpha > 0.0) {
        return Err(Error::DegenerateCubic);
    }
    if spec.is_quartic() {
        let c = spec.alpha * trace_constant(config.gamma_mode, config.basis_size as f64);
        return Ok(positive_cubic_root(spec.beta, c));
    }
    numeric_trace_minimum(spec, config)
}

/// Trace of `(a + a^dag)^(2k)` restricted to the retained states.
fn ladder_power_trace(k: u32, states: &[usize], dim: usize) -> f64 {
    let q = position_ladder(dim);
    let mut pow = DMatrix::<f64>::identity(dim, dim);
    for _ in 0..2 * k {
        pow = &pow * &q;
    }
    states.iter().map(|&j| pow[(j, j)]).sum()
}

/// General exponents: Tr H(g) = A g + alpha B_n / (4g)^n - beta B_m / (4g)^m.
fn numeric_trace_minimum(spec: &PotentialSpec, config: &SolverConfig) -> Result<f64> {
    let size = config.basis_size;
    let states: Vec<usize> = match config.gamma_mode {
        GammaMode::FullBasis => (0..size).collect(),
        GammaMode::EvenParity => (0..size).step_by(2).collect(),
        GammaMode::OddParity => (1..size).step_by(2).collect(),
        GammaMode::Manual(_) => unreachable!(),
    };
    let dim = size + config.pad.max(2 * spec.n_exp as usize);
    let kinetic: f64 = states.iter().map(|&j| (2 * j + 1) as f64).sum();
    let quartic_like = ladder_power_trace(spec.n_exp, &states, dim);
    let quadratic_like = ladder_power_trace(spec.m_exp, &states, dim);
    let (n, m) = (spec.n_exp as i32, spec.m_exp as i32);
    let slope = |g: f64| {
        kinetic - n as f64 * spec.alpha * quartic_like / (4f64.powi(n) * g.powi(n + 1))
            + m as f64 * spec.beta * quadratic_like / (4f64.powi(m) * g.powi(m + 1))
    };
    // slope -> -inf as g -> 0 and -> kinetic > 0 as g -> inf
    let mut lo = 1e-8;
    while slope(lo) > 0.0 {
        lo *= 0.5;
    }
    let mut hi = 1.0;
    while slope(hi) < 0.0 {
        hi *= 2.0;
    }
    crate::potential::bisect(slope, lo, hi)
}

/// Tridiagonal matrix of `a + a^dag` in `dim` number states.
fn position_ladder(dim: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(dim, dim);
    for j in 0..dim - 1 {
        let v = ((j + 1) as f64).sqrt();
        q[(j, j + 1)] = v;
        q[(j + 1, j)] = v;
    }
    q
}

/// `x` in `dim` number states for scale `gamma`.
pub fn position_matrix(gamma: f64, dim: usize) -> DMatrix<f64> {
    position_ladder(dim) / (2.0 * gamma.sqrt())
}

/// `p^2 = -gamma (a^dag - a)^2`, pentadiagonal.
pub fn momentum_squared_matrix(gamma: f64, dim: usize) -> DMatrix<f64> {
    let mut p2 = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        p2[(j, j)] = gamma * (2 * j + 1) as f64;
        if j + 2 < dim {
            let v = -gamma * (((j + 1) * (j + 2)) as f64).sqrt();
            p2[(j, j + 2)] = v;
            p2[(j + 2, j)] = v;
        }
    }
    p2
}

/// `H = p^2 + alpha x^(2n) - beta x^(2m) (+ h)` as an `N x N` matrix.
///
/// Powers of `x` are taken in the padded dimension and then truncated.
pub fn build_hamiltonian(spec: &PotentialSpec, gamma: f64, config: &SolverConfig) -> DMatrix<f64> {
    let size = config.basis_size;
    let dim = size + config.pad.max(2 * spec.n_exp as usize);
    let x = position_matrix(gamma, dim);
    let x2 = &x * &x;

    let mut high = x2.clone();
    for _ in 1..spec.n_exp {
        high = &high * &x2;
    }
    let mut low = x2;
    for _ in 1..spec.m_exp {
        low = &low * &x;
        low = &low * &x;
    }

    let full = momentum_squared_matrix(gamma, dim) + high * spec.alpha - low * spec.beta;
    let mut h = full.view((0, 0), (size, size)).into_owned();
    let offset = spec.offset();
    if offset != 0.0 {
        for j in 0..size {
            h[(j, j)] += offset;
        }
    }
    h
}

/// Closed-form diagonal of the quartic Hamiltonian.
pub fn quartic_diagonal(spec: &PotentialSpec, gamma: f64, m: usize) -> f64 {
    let m = m as f64;
    2.0 * gamma * (2.0 * m + 1.0) - (spec.beta + 4.0 * gamma * gamma) * (2.0 * m + 1.0) / (4.0 * gamma)
        + 3.0 * spec.alpha * (2.0 * m * m + 2.0 * m + 1.0) / (16.0 * gamma * gamma)
        + spec.offset()
}

fn parity_block(h: &DMatrix<f64>, start: usize) -> (Vec<usize>, DMatrix<f64>) {
    let idx: Vec<usize> = (start..h.nrows()).step_by(2).collect();
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
    (idx, block)
}

/// Diagonalize the Hamiltonian at the trace-minimizing `gamma`.
///
/// The matrix is block diagonal in number-state parity; each block is solved
/// on its own so that every eigenvector has definite parity even inside a
/// numerically degenerate doublet.
pub fn diagonalize(spec: &PotentialSpec, config: &SolverConfig) -> Result<Spectrum> {
    spec.validate()?;
    config.validate(spec)?;
    let gamma = solve_gamma(spec, config)?;
    let h = build_hamiltonian(spec, gamma, config);
    diagonalize_matrix(spec, gamma, &h)
}

pub(crate) fn diagonalize_matrix(spec: &PotentialSpec, gamma: f64, h: &DMatrix<f64>) -> Result<Spectrum> {
    let size = h.nrows();
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigensolverFailure(format!(
            "Hamiltonian has non-finite entries (gamma = {gamma})"
        )));
    }
    let norm = h.norm();

    struct Pair {
        energy: f64,
        parity: Parity,
        vector: DVector<f64>,
    }

    let mut pairs = Vec::with_capacity(size);
    for (start, parity) in [(0, Parity::Even), (1, Parity::Odd)] {
        let (idx, block) = parity_block(h, start);
        if idx.is_empty() {
            continue;
        }
        let eig = SymmetricEigen::try_new(block, f64::EPSILON, 10_000).ok_or_else(|| {
            Error::EigensolverFailure(format!(
                "QR iteration did not converge on the {parity:?} block (||H||_F = {norm:e})"
            ))
        })?;
        for (k, &energy) in eig.eigenvalues.iter().enumerate() {
            let mut vector = DVector::zeros(size);
            for (i, &row) in idx.iter().enumerate() {
                vector[row] = eig.eigenvectors[(i, k)];
            }
            pairs.push(Pair { energy, parity, vector });
        }
    }

    let tie = 1e-13f64.max(64.0 * f64::EPSILON * norm);
    pairs.sort_by(|a, b| {
        if (a.energy - b.energy).abs() < tie {
            a.parity.cmp(&b.parity)
        } else {
            a.energy.total_cmp(&b.energy)
        }
    });

    let mut coefficients = DMatrix::zeros(size, size);
    let mut eigenvalues = Vec::with_capacity(size);
    let mut parities = Vec::with_capacity(size);
    for (n, mut pair) in pairs.into_iter().enumerate() {
        let lead = pair.vector.iamax();
        if pair.vector[lead] < 0.0 {
            pair.vector.neg_mut();
        }
        coefficients.set_column(n, &pair.vector);
        eigenvalues.push(pair.energy);
        parities.push(pair.parity);
    }

    let worst = (0..size / 2)
        .map(|n| {
            let v = coefficients.column(n);
            (h * v - v * eigenvalues[n]).norm()
        })
        .fold(0.0, f64::max);
    if !(worst < 1e-9 * norm) {
        return Err(Error::EigensolverFailure(format!(
            "eigen-residual {worst:e} exceeds 1e-9 ||H||_F = {:e}",
            1e-9 * norm
        )));
    }

    Ok(Spectrum {
        gamma,
        eigenvalues,
        coefficients,
        parities,
        shift_included: spec.include_shift,
        barrier_height: spec.barrier_height(),
    })
}
