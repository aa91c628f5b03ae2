//! Exact diagonalization of the symmetric double well `alpha x^4 - beta x^2`
//! in a scaled oscillator basis, with information-theoretic measures of its
//! eigenstates, semiclassical phase-space quantities and the confined
//! harmonic oscillator.

pub mod basis;
pub mod cho;
pub mod entropy;
pub mod error;
pub mod potential;
pub mod qho;
pub mod quadrature;
pub mod semiclassics;
pub mod sweep;
pub mod wavefunction;

pub use basis::{diagonalize, GammaMode, SolverConfig, Spectrum};
pub use error::{Error, Result};
pub use potential::PotentialSpec;
pub use quadrature::QuadratureConfig;
pub use wavefunction::{Parity, Space, StateFunctions};
