use dwell::basis::{diagonalize, solve_gamma, SolverConfig, Spectrum};
use dwell::entropy::state_report;
use dwell::potential::PotentialSpec;
use dwell::quadrature::{integrate, QuadratureConfig};
use dwell::semiclassics::{phase_area, phase_contour, tunneling_onset};
use dwell::sweep::{compute_sweep, report_extrema_table, run_derivatives, BetaGrid, Extremum, ExtremumKind, Measure, SweepSpec};
use dwell::wavefunction::Space;

fn solve(alpha: f64, beta: f64) -> (PotentialSpec, Spectrum) {
    let spec = PotentialSpec::quartic(alpha, beta, true).unwrap();
    let s = diagonalize(&spec, &SolverConfig::default()).unwrap();
    (spec, s)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while b - a > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

#[test]
fn gamma_minimizes_the_hamiltonian_trace() {
    let (alpha, beta, n) = (0.01, 1.0, 100usize);
    // diagonal of p^2 + alpha x^4 - beta x^2 summed over number states 0..=n
    let trace = |g: f64| -> f64 {
        (0..=n)
            .map(|m| {
                let m = m as f64;
                g * (2.0 * m + 1.0) + alpha * (6.0 * m * m + 6.0 * m + 3.0) / (16.0 * g * g)
                    - beta * (2.0 * m + 1.0) / (4.0 * g)
            })
            .sum()
    };
    let oracle = golden_section(trace, 1e-3, 10.0, 1e-12);
    let spec = PotentialSpec::quartic(alpha, beta, false).unwrap();
    let gamma = solve_gamma(&spec, &SolverConfig::with_basis_size(n)).unwrap();
    assert!((gamma - oracle).abs() < 1e-8, "{gamma} vs {oracle}");
}

#[test]
fn weak_well_reference_energies() {
    let spec = PotentialSpec::quartic(0.01, 1.0, false).unwrap();
    let s = diagonalize(&spec, &SolverConfig::with_basis_size(100)).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(s.energy(0), -23.595951394702293117574292) < 1e-13, "{}", s.energy(0));
    assert!(rel(s.energy(1), -23.59595139470229311739743) < 1e-12, "{}", s.energy(1));
    assert!(rel(s.energy(5), -18.129911166285953197575) < 1e-12, "{}", s.energy(5));

    let shifted = diagonalize(&spec.with_shift(true), &SolverConfig::with_basis_size(100)).unwrap();
    assert!((shifted.energy(0) - 1.4040486052977069).abs() < 1e-11, "{}", shifted.energy(0));
}

#[test]
fn turning_points_of_the_ground_state() {
    let (spec, s) = solve(1.0, 5.0);
    let e = s.energy(0);
    let tp = spec.turning_points(e).unwrap();
    let inner = tp.inner.expect("ground state lies below the barrier");
    for x in [inner, tp.outer] {
        assert!((spec.evaluate(x) - e).abs() < 1e-10, "V({x}) - E = {}", spec.evaluate(x) - e);
    }
    let x0 = spec.geometry().x0;
    assert!(0.0 < inner && inner < x0 && x0 < tp.outer);
}

#[test]
fn ground_state_is_even() {
    let (_, s) = solve(1.0, 5.0);
    let state = s.state(0).unwrap();
    let reach = state.support(Space::Position);
    for i in 0..100 {
        let x = reach * i as f64 / 99.0;
        assert!((state.psi_x(x) - state.psi_x(-x)).abs() < 1e-10);
    }
}

#[test]
fn momentum_densities_are_even() {
    let (_, s) = solve(1.0, 5.0);
    for n in 0..8 {
        let state = s.state(n).unwrap();
        let reach = state.support(Space::Momentum);
        for i in 0..100 {
            let p = reach * i as f64 / 99.0;
            let (a, b) = (state.density(Space::Momentum, p), state.density(Space::Momentum, -p));
            assert!((a - b).abs() < 1e-12, "n={n} p={p}");
        }
    }
}

#[test]
fn kinetic_energy_agrees_in_both_spaces() {
    let (_, s) = solve(1.0, 5.0);
    let state = s.state(0).unwrap();
    let q = QuadratureConfig::default();
    let reach = state.support(Space::Position);
    let from_slope = integrate(
        |x| {
            let (_, d) = state.psi_x_with_derivative(x);
            d * d
        },
        -reach,
        reach,
        &q,
    )
    .unwrap();
    let r = state_report(&state, &q).unwrap();
    let p2 = r.momentum.second_moment;
    assert!((p2 - from_slope).abs() < 1e-8 * p2, "{p2} vs {from_slope}");
    assert!((r.measures.fisher_x - 4.0 * p2).abs() < 1e-7 * r.measures.fisher_x);
}

#[test]
fn density_slope_matches_central_differences() {
    let (_, s) = solve(1.0, 5.0);
    let state = s.state(0).unwrap();
    let h = 1e-5;
    let reach = 0.5 * state.support(Space::Position);
    let samples: Vec<(f64, f64)> = (0..200)
        .map(|i| {
            let x = -reach + 2.0 * reach * i as f64 / 199.0;
            let (_, d) = state.density_and_derivative(Space::Position, x);
            let fd = (state.density(Space::Position, x + h) - state.density(Space::Position, x - h)) / (2.0 * h);
            (d, fd)
        })
        .collect();
    let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.0.abs()));
    for (d, fd) in samples {
        assert!((d - fd).abs() <= 1e-6 * d.abs().max(1e-2 * scale), "{d} vs {fd}");
    }
}

#[test]
fn ground_state_spreads_as_the_barrier_grows() {
    let spec = SweepSpec::new(vec![1.0], BetaGrid::new(0.0, 10.0, 0.25), vec![0], vec![Measure::Sigma]);
    let table = compute_sweep(&spec).unwrap();
    let (_, sx) = table.series(1.0, 0, "sigma_x").unwrap();
    let (_, prod) = table.series(1.0, 0, "sigma_product").unwrap();
    assert!(sx.windows(2).all(|w| w[1] > w[0]), "{sx:?}");
    assert!(prod.windows(2).all(|w| w[1] > w[0]), "{prod:?}");
}

#[test]
fn ground_orbit_splits_near_the_onset() {
    let lobes = |beta: f64| {
        let (spec, s) = solve(1.0, beta);
        phase_contour(&spec, &s, 0, 100).unwrap().lobes
    };
    assert_eq!(lobes(0.0), 1);
    assert_eq!(lobes(2.2), 1);
    assert_eq!(lobes(2.3), 2);
    assert_eq!(lobes(5.0), 2);
}

#[test]
fn ground_state_tunneling_onset() {
    let beta = tunneling_onset(1.0, 0, 1.0, 4.0, &SolverConfig::default(), 1e-6).unwrap();
    assert!((beta - 2.25).abs() <= 0.05, "{beta}");
}

#[test]
fn deep_well_plateaus() {
    let (_, s) = solve(1.0, 20.0);
    let q = QuadratureConfig::default();
    let m: Vec<_> = (0..4).map(|n| state_report(&s.state(n).unwrap(), &q).unwrap().measures).collect();
    assert!((m[2].shannon_total - 3.08).abs() <= 0.02 && (m[3].shannon_total - 3.08).abs() <= 0.02);
    for pair in [(0, 1), (2, 3)] {
        let (a, b) = (m[pair.0], m[pair.1]);
        let (e, os) = if pair.0 == 0 { (0.1195, 0.6465) } else { (0.0667, 0.525) };
        let os_tol = if pair.0 == 0 { 0.005 } else { 0.01 };
        for v in [a, b] {
            assert!((v.onicescu_net - e).abs() <= 0.002, "{pair:?} E={}", v.onicescu_net);
            assert!((v.os_net - os).abs() <= os_tol, "{pair:?} OS={}", v.os_net);
        }
    }
}

#[test]
fn excited_doublet_phase_areas() {
    let (spec, s) = solve(1.0, 10.0);
    let q = QuadratureConfig::default();
    for n in [2, 3] {
        let a = phase_area(&spec, &s, n, &q).unwrap();
        assert!((a - 4.705).abs() <= 0.03, "A_{n} = {a}");
    }
}

#[test]
fn ground_state_entropy_levels_off() {
    let spec = SweepSpec::new(vec![1.0], BetaGrid::new(5.0, 10.0, 0.25), vec![0], vec![Measure::Shannon]);
    let report = &run_derivatives(&spec, Measure::Shannon).unwrap()[0];
    for (beta, d) in report.beta_grid.iter().zip(&report.d_measure_total) {
        if *beta >= 6.0 {
            assert!(d.abs() < 0.01, "dS/dbeta = {d} at {beta}");
        }
    }
}

fn positions(list: &[Extremum], kind: ExtremumKind) -> Vec<f64> {
    list.iter().filter(|e| e.kind == kind).map(|e| e.beta).collect()
}

fn near(found: &[f64], expected: &[f64]) -> bool {
    found.len() == expected.len() && found.iter().zip(expected).all(|(a, b)| (a - b).abs() <= 0.25 + 1e-12)
}

#[test]
fn onicescu_extrema_positions() {
    let spec = SweepSpec::new(vec![0.5, 1.0, 2.0], BetaGrid::new(0.0, 14.0, 0.25), vec![0, 2, 3], vec![Measure::Onicescu]);
    let rows = report_extrema_table(&spec).unwrap();
    let row = |alpha: f64, n: usize| rows.iter().find(|r| r.alpha == alpha && r.state == n).unwrap();

    let r = row(1.0, 0);
    assert!(near(&positions(&r.onicescu_x, ExtremumKind::Minimum), &[3.75]), "{:?}", r.onicescu_x);
    assert!(near(&positions(&r.onicescu_p, ExtremumKind::Maximum), &[3.75]), "{:?}", r.onicescu_p);

    let r = row(0.5, 0);
    assert!(near(&positions(&r.onicescu_x, ExtremumKind::Minimum), &[2.5]), "{:?}", r.onicescu_x);

    let r = row(2.0, 2);
    let betas: Vec<f64> = r.onicescu_x.iter().map(|e| e.beta).collect();
    let kinds: Vec<ExtremumKind> = r.onicescu_x.iter().map(|e| e.kind).collect();
    assert!(near(&betas, &[5.0, 6.5, 11.0]), "{betas:?}");
    assert_eq!(kinds, [ExtremumKind::Minimum, ExtremumKind::Maximum, ExtremumKind::Minimum]);

    let r = row(1.0, 3);
    assert!(near(&positions(&r.onicescu_p, ExtremumKind::Maximum), &[5.75]), "{:?}", r.onicescu_p);
}
