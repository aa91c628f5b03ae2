//! Parameter sweeps over `(alpha, beta, state)`, numerical beta-derivatives,
//! extremum and merge detection, and deterministic CSV/JSON export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{diagonalize, SolverConfig};
use crate::entropy::state_report;
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::quadrature::QuadratureConfig;
use crate::semiclassics::{phase_area, tunneling_probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    Fisher,
    Shannon,
    Onicescu,
    Os,
    Sigma,
    Tunneling,
    Area,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Fisher,
        Measure::Shannon,
        Measure::Onicescu,
        Measure::Os,
        Measure::Sigma,
        Measure::Tunneling,
        Measure::Area,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Fisher => "fisher",
            Measure::Shannon => "shannon",
            Measure::Onicescu => "onicescu",
            Measure::Os => "os",
            Measure::Sigma => "sigma",
            Measure::Tunneling => "tunneling",
            Measure::Area => "area",
        }
    }

    /// Output columns, in order.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Measure::Fisher => &["fisher_x", "fisher_p", "fisher_net"],
            Measure::Shannon => &["shannon_x", "shannon_p", "shannon_total"],
            Measure::Onicescu => &["onicescu_x", "onicescu_p", "onicescu_net"],
            Measure::Os => &["os_x", "os_p", "os_net"],
            Measure::Sigma => &["sigma_x", "sigma_p", "sigma_product"],
            Measure::Tunneling => &["t_prob"],
            Measure::Area => &["area"],
        }
    }

    fn needs_integrals(self) -> bool {
        !matches!(self, Measure::Tunneling | Measure::Area)
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl BetaGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta step must be positive, got {}", self.step)));
        }
        if !(self.start >= 0.0 && self.stop >= self.start) {
            return Err(Error::InvalidConfig(format!(
                "beta range must satisfy 0 <= start <= stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid points `start + i step`, the last one within `step / 2^20` of `stop`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-6).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alpha_values: Vec<f64>,
    pub beta_grid: BetaGrid,
    pub states: Vec<usize>,
    pub measures: Vec<Measure>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub solver: SolverConfig,
    pub quadrature: QuadratureConfig,
}

impl SweepSpec {
    pub fn new(alpha_values: Vec<f64>, beta_grid: BetaGrid, states: Vec<usize>, measures: Vec<Measure>) -> Self {
        Self {
            alpha_values,
            beta_grid,
            states,
            measures,
            output_path: None,
            format: Format::Csv,
            solver: SolverConfig::default(),
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.beta_grid.validate()?;
        if self.alpha_values.is_empty() || self.alpha_values.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidConfig("alpha values must be a non-empty list of positive numbers".into()));
        }
        if self.states.is_empty() {
            return Err(Error::InvalidConfig("states must be non-empty".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidConfig("measures must be non-empty".into()));
        }
        if let Some(&n) = self.states.iter().find(|&&n| n >= self.solver.basis_size) {
            return Err(Error::StateOutOfRange {
                index: n,
                size: self.solver.basis_size,
            });
        }
        self.quadrature.validate()
    }

    /// Measures in canonical order without repeats.
    fn measure_list(&self) -> Vec<Measure> {
        let mut m = self.measures.clone();
        m.sort();
        m.dedup();
        m
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["alpha", "beta", "state"];
        for m in self.measure_list() {
            cols.extend_from_slice(m.columns());
        }
        cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub state: usize,
    /// Aligned with the measure columns of [`SweepTable::columns`] after the first three.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().skip(3).position(|c| c == name)
    }

    /// `(beta, value)` pairs for one column at fixed `(alpha, state)`, sorted by beta.
    pub fn series(&self, alpha: f64, state: usize, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let idx = self
            .column_index(column)
            .ok_or_else(|| Error::InvalidConfig(format!("column '{column}' not in sweep")))?;
        let (betas, values) = self
            .rows
            .iter()
            .filter(|r| r.alpha == alpha && r.state == state)
            .map(|r| (r.beta, r.values[idx]))
            .unzip();
        Ok((betas, values))
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{}", format_number(r.alpha), format_number(r.beta), r.state);
            for v in &r.values {
                out.push(',');
                out.push_str(&format_number(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("alpha".into(), json_number(r.alpha));
                obj.insert("beta".into(), json_number(r.beta));
                obj.insert("state".into(), serde_json::Value::from(r.state));
                for (name, v) in self.columns.iter().skip(3).zip(&r.values) {
                    obj.insert(name.clone(), json_number(*v));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Round to 15 significant digits.
pub fn round_significant(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Locale-independent text with 15 significant digits; the shortest form
/// that reads back to the rounded value.
pub fn format_number(v: f64) -> String {
    let r = round_significant(v);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_significant(v))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

fn point_rows(alpha: f64, beta: f64, spec: &SweepSpec, measures: &[Measure]) -> Result<Vec<SweepRow>> {
    let potential = PotentialSpec::quartic(alpha, beta, true)?;
    let spectrum = diagonalize(&potential, &spec.solver)?;
    let q = &spec.quadrature;
    let need_integrals = measures.iter().any(|m| m.needs_integrals());
    spec.states
        .iter()
        .map(|&n| {
            let report = if need_integrals {
                Some(state_report(&spectrum.state(n)?, q)?)
            } else {
                None
            };
            let mut values = Vec::new();
            for m in measures {
                match m {
                    Measure::Tunneling => values.push(tunneling_probability(&potential, &spectrum, n, q)?.t_prob),
                    Measure::Area => values.push(phase_area(&potential, &spectrum, n, q)?),
                    _ => {
                        let s = report.as_ref().expect("integrals computed").measures;
                        values.extend_from_slice(&match m {
                            Measure::Fisher => [s.fisher_x, s.fisher_p, s.fisher_net],
                            Measure::Shannon => [s.shannon_x, s.shannon_p, s.shannon_total],
                            Measure::Onicescu => [s.onicescu_x, s.onicescu_p, s.onicescu_net],
                            Measure::Os => [s.os_x, s.os_p, s.os_net],
                            Measure::Sigma => [s.sigma_x, s.sigma_p, s.uncertainty_product()],
                            Measure::Tunneling | Measure::Area => unreachable!(),
                        });
                    }
                }
            }
            Ok(SweepRow {
                alpha,
                beta,
                state: n,
                values,
            })
        })
        .collect()
}

/// Evaluate every `(alpha, beta)` point in parallel; rows sorted by `(alpha, beta, state)`.
pub fn compute_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let measures = spec.measure_list();
    let betas = spec.beta_grid.points();
    let points: Vec<(f64, f64)> = spec
        .alpha_values
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let chunks: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(a, b)| point_rows(a, b, spec, &measures))
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(|x, y| {
        x.alpha
            .total_cmp(&y.alpha)
            .then(x.beta.total_cmp(&y.beta))
            .then(x.state.cmp(&y.state))
    });
    Ok(SweepTable {
        columns: spec.columns().into_iter().map(String::from).collect(),
        rows,
    })
}

/// Compute the sweep and write it to `spec.output_path` if one is set.
///
/// The file is written to a sibling temporary path and renamed, so a failed
/// run leaves no partial output behind.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let table = compute_sweep(spec)?;
    if let Some(path) = &spec.output_path {
        write_atomically(path, &table.render(spec.format))?;
    }
    Ok(table)
}

pub fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let io = |e: std::io::Error| Error::Io(format!("cannot write {}: {e}", path.display()));
    if let Err(e) = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(io(e));
    }
    Ok(())
}

/// Central differences inside, one-sided at the two ends.
pub fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub beta: f64,
    pub kind: ExtremumKind,
}

/// Interior extrema of sampled `y`.
///
/// Consecutive differences smaller than `flat_tol` count as flat and are
/// skipped, so noise on a plateau does not yield spurious turns. Each
/// extremum is placed at the grid point with the extreme value between two
/// opposite-signed slopes.
pub fn find_extrema(x: &[f64], y: &[f64], flat_tol: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    // (sign, index of first point of the step)
    let mut last: Option<(f64, usize)> = None;
    for i in 0..y.len().saturating_sub(1) {
        let d = y[i + 1] - y[i];
        if d.abs() <= flat_tol {
            continue;
        }
        let s = d.signum();
        if let Some((prev, j)) = last {
            if s != prev {
                // turning between points j+1 ..= i
                let range = j + 1..=i;
                let pick = if prev > 0.0 {
                    range.max_by(|&a, &b| y[a].total_cmp(&y[b]))
                } else {
                    range.min_by(|&a, &b| y[a].total_cmp(&y[b]))
                };
                if let Some(k) = pick {
                    out.push(Extremum {
                        beta: x[k],
                        kind: if prev > 0.0 {
                            ExtremumKind::Maximum
                        } else {
                            ExtremumKind::Minimum
                        },
                    });
                }
            }
        }
        last = Some((s, i));
    }
    out
}

/// Relative flatness threshold for extremum detection.
pub const FLAT_TOL: f64 = 1e-7;

fn flat_tol_for(y: &[f64]) -> f64 {
    FLAT_TOL * y.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub alpha: f64,
    pub state: usize,
    pub measure: Measure,
    pub beta_grid: Vec<f64>,
    pub measure_x: Vec<f64>,
    pub measure_p: Vec<f64>,
    pub measure_total: Vec<f64>,
    pub d_measure_x: Vec<f64>,
    pub d_measure_p: Vec<f64>,
    pub d_measure_total: Vec<f64>,
    /// Turns of the derivative curves: points where `d^2/d beta^2` changes sign.
    pub extrema_x: Vec<Extremum>,
    pub extrema_p: Vec<Extremum>,
    pub extrema_total: Vec<Extremum>,
}

impl DerivativeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,measure_x,measure_p,measure_total,d_measure_x,d_measure_p,d_measure_total\n");
        for i in 0..self.beta_grid.len() {
            let cells = [
                self.beta_grid[i],
                self.measure_x[i],
                self.measure_p[i],
                self.measure_total[i],
                self.d_measure_x[i],
                self.d_measure_p[i],
                self.d_measure_total[i],
            ];
            let line: Vec<String> = cells.iter().map(|v| format_number(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

const MIN_DERIVATIVE_POINTS: usize = 5;

/// Derivatives in beta of one measure family for every `(alpha, state)` in the spec.
pub fn run_derivatives(spec: &SweepSpec, measure: Measure) -> Result<Vec<DerivativeReport>> {
    let points = spec.beta_grid.points().len();
    if points < MIN_DERIVATIVE_POINTS {
        return Err(Error::GridTooCoarse {
            points,
            required: MIN_DERIVATIVE_POINTS,
        });
    }
    if matches!(measure, Measure::Tunneling | Measure::Area) {
        return Err(Error::InvalidConfig(format!(
            "derivatives need a measure with position and momentum parts, got '{}'",
            measure.name()
        )));
    }
    let mut sub = spec.clone();
    sub.measures = vec![measure];
    let table = compute_sweep(&sub)?;
    let cols = measure.columns();
    let mut reports = Vec::new();
    for &alpha in &spec.alpha_values {
        for &state in &spec.states {
            let (betas, mx) = table.series(alpha, state, cols[0])?;
            let (_, mp) = table.series(alpha, state, cols[1])?;
            let (_, mt) = table.series(alpha, state, cols[2])?;
            let (dx, dp, dt) = (derivative(&betas, &mx), derivative(&betas, &mp), derivative(&betas, &mt));
            reports.push(DerivativeReport {
                alpha,
                state,
                measure,
                extrema_x: find_extrema(&betas, &dx, flat_tol_for(&dx)),
                extrema_p: find_extrema(&betas, &dp, flat_tol_for(&dp)),
                extrema_total: find_extrema(&betas, &dt, flat_tol_for(&dt)),
                beta_grid: betas,
                measure_x: mx,
                measure_p: mp,
                measure_total: mt,
                d_measure_x: dx,
                d_measure_p: dp,
                d_measure_total: dt,
            });
        }
    }
    Ok(reports)
}

/// Default tolerance and run length for calling two curves merged.
pub const MERGE_TOL: f64 = 1e-3;
pub const MERGE_RUN: usize = 3;

/// First grid point of the first run of `run` consecutive points where `|a - b| < tol`.
pub fn merge_point(betas: &[f64], a: &[f64], b: &[f64], tol: f64, run: usize) -> Option<f64> {
    let mut count = 0;
    for i in 0..betas.len().min(a.len()).min(b.len()) {
        if (a[i] - b[i]).abs() < tol {
            count += 1;
            if count >= run {
                return Some(betas[i + 1 - run]);
            }
        } else {
            count = 0;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaRow {
    pub alpha: f64,
    pub state: usize,
    pub onicescu_x: Vec<Extremum>,
    pub onicescu_p: Vec<Extremum>,
}

/// Positions in beta of the extrema of `E_x` and `E_p` for each `(alpha, state)`.
pub fn report_extrema_table(spec: &SweepSpec) -> Result<Vec<ExtremaRow>> {
    if spec.beta_grid.step > 0.25 + 1e-12 {
        return Err(Error::GridTooCoarse {
            points: spec.beta_grid.points().len(),
            required: ((spec.beta_grid.stop - spec.beta_grid.start) / 0.25).floor() as usize + 1,
        });
    }
    let mut sub = spec.clone();
    sub.measures = vec![Measure::Onicescu];
    let table = compute_sweep(&sub)?;
    let mut rows = Vec::new();
    for &alpha in &spec.alpha_values {
        for &state in &spec.states {
            let (betas, ex) = table.series(alpha, state, "onicescu_x")?;
            let (_, ep) = table.series(alpha, state, "onicescu_p")?;
            rows.push(ExtremaRow {
                alpha,
                state,
                onicescu_x: find_extrema(&betas, &ex, flat_tol_for(&ex)),
                onicescu_p: find_extrema(&betas, &ep, flat_tol_for(&ep)),
            });
        }
    }
    Ok(rows)
}

pub fn extrema_table_csv(rows: &[ExtremaRow]) -> String {
    let fmt = |list: &[Extremum]| -> String {
        list.iter()
            .map(|e| {
                let tag = match e.kind {
                    ExtremumKind::Minimum => "min",
                    ExtremumKind::Maximum => "max",
                };
                format!("{}@{}", tag, format_number(e.beta))
            })
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut out = String::from("alpha,state,onicescu_x_extrema,onicescu_p_extrema\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_number(r.alpha),
            r.state,
            fmt(&r.onicescu_x),
            fmt(&r.onicescu_p)
        );
    }
    out
}
