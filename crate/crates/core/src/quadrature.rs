//! Composite quadrature with panel doubling.
//!
//! Every integral is computed at `panels` and `2 panels` (and so on) until
//! two successive estimates agree to `max(abs_tol, rel_tol |value|)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    CompositeSimpson,
    /// 20-point Gauss-Legendre on each panel.
    GaussLegendrePanels,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rule: Rule,
    pub panels: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Multiplier applied to a wavefunction's support estimate.
    pub domain_cut: f64,
    /// Refinement stops with [`Error::NonConvergent`] beyond this many panels.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rule: Rule::GaussLegendrePanels,
            panels: 16,
            abs_tol: 1e-11,
            rel_tol: 1e-9,
            domain_cut: 1.2,
            max_panels: 1 << 14,
        }
    }
}

impl QuadratureConfig {
    pub fn simpson() -> Self {
        Self {
            rule: Rule::CompositeSimpson,
            panels: 64,
            max_panels: 1 << 22,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 8 {
            return Err(Error::InvalidConfig(format!("panels must be >= 8, got {}", self.panels)));
        }
        if !(self.abs_tol > f64::EPSILON && self.rel_tol > f64::EPSILON) {
            return Err(Error::InvalidConfig("tolerances must exceed machine epsilon".into()));
        }
        if !(self.domain_cut > 0.0) {
            return Err(Error::InvalidConfig("domain_cut must be positive".into()));
        }
        Ok(())
    }
}

const GL_ORDER: usize = 20;

/// Nodes and weights of the Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(z) and P_{n-1}(z)
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}

fn apply_rule<const K: usize>(f: &impl Fn(f64) -> [f64; K], a: f64, b: f64, panels: usize, rule: Rule) -> [f64; K] {
    let width = (b - a) / panels as f64;
    let mut acc = [0.0; K];
    let mut add = |x: f64, w: f64| {
        let v = f(x);
        for k in 0..K {
            acc[k] += w * v[k];
        }
    };
    match rule {
        Rule::GaussLegendrePanels => {
            let (nodes, weights) = gauss_legendre();
            let half = 0.5 * width;
            for j in 0..panels {
                let mid = a + (j as f64 + 0.5) * width;
                for (z, w) in nodes.iter().zip(weights) {
                    add(mid + half * z, half * w);
                }
            }
        }
        Rule::CompositeSimpson => {
            // each panel is one Simpson interval [left, mid, right]
            let sixth = width / 6.0;
            add(a, sixth);
            add(b, sixth);
            for j in 1..panels {
                add(a + j as f64 * width, 2.0 * sixth);
            }
            for j in 0..panels {
                add(a + (j as f64 + 0.5) * width, 4.0 * sixth);
            }
        }
    }
    acc
}

/// Repeat `estimate(panels)` with doubled panels until two estimates agree.
fn refine<const K: usize>(estimate: impl Fn(usize) -> [f64; K], start: usize, scale: usize, config: &QuadratureConfig) -> Result<[f64; K]> {
    let mut panels = start;
    let mut coarse = estimate(panels);
    loop {
        let fine_panels = panels * 2;
        let fine = estimate(fine_panels);
        if fine.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergent {
                coarse: coarse[0],
                fine: fine[0],
                panels: fine_panels * scale,
            });
        }
        let worst = (0..K)
            .map(|k| (fine[k] - coarse[k]).abs() - config.abs_tol.max(config.rel_tol * fine[k].abs()))
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(&y.1));
        match worst {
            Some((_, excess)) if excess > 0.0 => {}
            _ => return Ok(fine),
        }
        if fine_panels * scale >= config.max_panels {
            let k = worst.map(|w| w.0).unwrap_or(0);
            return Err(Error::NonConvergent {
                coarse: coarse[k],
                fine: fine[k],
                panels: fine_panels * scale,
            });
        }
        panels = fine_panels;
        coarse = fine;
    }
}

/// Integrate several integrands over the same points at once.
///
/// Convergence is required of every component.
pub fn integrate_many<const K: usize>(
    f: impl Fn(f64) -> [f64; K],
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<[f64; K]> {
    config.validate()?;
    if !(a < b) {
        return Err(Error::InvalidConfig(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    refine(|panels| apply_rule(&f, a, b, panels, config.rule), config.panels, 1, config)
}

/// Integrate over the consecutive segments `breaks[i]..breaks[i + 1]`.
///
/// Each segment is mapped by `x = a + (b - a) sin^2(theta)`, so endpoint
/// behaviour such as `u^2 ln u` at a breakpoint becomes smooth in `theta`.
/// Placing breakpoints at the zeros of a density restores fast convergence
/// of `rho ln rho`. `max_panels` bounds the panel total over all segments.
pub fn integrate_many_segments<const K: usize>(
    f: impl Fn(f64) -> [f64; K],
    breaks: &[f64],
    config: &QuadratureConfig,
) -> Result<[f64; K]> {
    config.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("breakpoints must be at least two strictly increasing values".into()));
    }
    let segments = breaks.len() - 1;
    let estimate = |panels: usize| {
        let mut acc = [0.0; K];
        for w in breaks.windows(2) {
            let (a, span) = (w[0], w[1] - w[0]);
            let g = |theta: f64| {
                let (s, c) = theta.sin_cos();
                let jac = 2.0 * span * s * c;
                let mut v = f(a + span * s * s);
                for x in v.iter_mut() {
                    *x *= jac;
                }
                v
            };
            let part = apply_rule(&g, 0.0, std::f64::consts::FRAC_PI_2, panels, config.rule);
            for k in 0..K {
                acc[k] += part[k];
            }
        }
        acc
    };
    let start = config.panels.div_ceil(segments).max(1);
    refine(estimate, start, segments, config)
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, config: &QuadratureConfig) -> Result<f64> {
    integrate_many(|x| [f(x)], a, b, config).map(|v| v[0])
}

/// Integrals whose integrand vanishes like a square root at both ends.
///
/// Maps `x = a + (b - a) sin^2(theta)`, which turns `sqrt` endpoint behaviour
/// into a smooth integrand in `theta`.
pub fn integrate_sqrt_endpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, config: &QuadratureConfig) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidConfig(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let span = b - a;
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        f(a + span * s * s) * 2.0 * span * s * c
    };
    integrate(g, 0.0, std::f64::consts::FRAC_PI_2, config)
}

/// Densities below this are treated as exactly zero in `rho ln rho`.
pub const LOG_FLOOR: f64 = 1e-300;

/// `-rho ln rho` with the limit value `0` at `rho -> 0`.
pub fn neg_rho_ln_rho(rho: f64) -> f64 {
    if rho < LOG_FLOOR {
        0.0
    } else {
        -rho * rho.ln()
    }
}
