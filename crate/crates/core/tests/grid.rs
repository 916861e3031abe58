mod support;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use imposter::feedback::{run_open_loop, DrivenSystem, TimeGrid};
use imposter::grid::*;
use imposter::{AtomSpec, PulseSpec};
use support::fourier_hamiltonian;

fn lowest_eigenvalue(h: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn relaxation_matches_dense_diagonalization() {
    let grid = Grid1D::new(25.0, 256).unwrap();
    for potential in [
        Potential::soft_coulomb(&grid, 2f64.sqrt()).unwrap(),
        Potential::soft_coulomb(&grid, 0.8).unwrap(),
        Potential::harmonic(&grid, 0.7),
    ] {
        let exact = lowest_eigenvalue(fourier_hamiltonian(grid.dx(), potential.values()));
        let (state, energy) =
            imaginary_time_ground_state(&grid, &potential, &RelaxOptions::default()).unwrap();
        assert!((energy - exact).abs() < 1e-8, "{energy} vs {exact}");
        assert!((state.norm(&grid) - 1.0).abs() < 1e-12);
    }
}

/// Lowest eigenvalue of a symmetric tridiagonal matrix with constant
/// off-diagonal, by Sturm-sequence bisection.
fn lowest_tridiagonal(diagonal: &[f64], off: f64) -> f64 {
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in diagonal.iter().enumerate() {
            q = d - x - if i == 0 { 0.0 } else { off * off / q };
            if q == 0.0 {
                q = 1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bound = diagonal.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * off.abs();
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn soft_coulomb_hydrogen_binds_by_half_a_hartree() {
    let grid = Grid1D::new(60.0, 1024).unwrap();
    let potential = Potential::soft_coulomb(&grid, 2f64.sqrt()).unwrap();
    let (_, energy) = imaginary_time_ground_state(&grid, &potential, &RelaxOptions::default()).unwrap();
    assert!((energy + 0.5).abs() < 1e-3, "{energy}");

    // three-point finite differences as an independent discretization
    let n = 8001;
    let half = 60.0;
    let dx = 2.0 * half / (n - 1) as f64;
    let diagonal: Vec<f64> = (0..n)
        .map(|i| {
            let x = -half + dx * i as f64;
            1.0 / (dx * dx) - 1.0 / (x * x + 2.0).sqrt()
        })
        .collect();
    let tridiagonal = lowest_tridiagonal(&diagonal, -0.5 / (dx * dx));
    assert!((tridiagonal - energy).abs() < 1e-4, "{tridiagonal} vs {energy}");
}

#[test]
fn free_particle_relaxes_to_the_lowest_box_mode() {
    let grid = Grid1D::new(10.0, 64).unwrap();
    let (_, energy) =
        imaginary_time_ground_state(&grid, &Potential::free(&grid), &RelaxOptions::default()).unwrap();
    assert!(energy.abs() < 1e-10);
}

#[test]
fn calibration_recovers_known_softenings() {
    let grid = Grid1D::new(40.0, 512).unwrap();
    let alpha = calibrate_softening(0.5, &grid).unwrap();
    assert!((alpha - 2f64.sqrt()).abs() < 2e-3, "{alpha}");

    let argon = calibrate_softening(0.579, &grid).unwrap();
    let h = fourier_hamiltonian(grid.dx(), Potential::soft_coulomb(&grid, argon).unwrap().values());
    assert!((lowest_eigenvalue(h) + 0.579).abs() < 1e-4);

    // fixed point: the binding energy of a probe softening gives it back
    let probe = 1.7;
    let h = fourier_hamiltonian(grid.dx(), Potential::soft_coulomb(&grid, probe).unwrap().values());
    let back = calibrate_softening(-lowest_eigenvalue(h), &grid).unwrap();
    assert!((back - probe).abs() < 1e-3, "{back}");
}

#[test]
fn calibration_rejects_bad_targets() {
    let grid = Grid1D::new(40.0, 512).unwrap();
    assert!(calibrate_softening(0.1, &grid).is_err());
    assert!(calibrate_softening(2.5, &grid).is_err());
    assert!(matches!(
        calibrate_softening_in(0.5, &grid, (2.0, 3.0)),
        Err(imposter::Error::Calibration(_))
    ));
}

#[test]
fn default_box_contains_the_ground_state() {
    let numerics = AtomNumerics::default();
    let grid = numerics.grid;
    let potential = Potential::soft_coulomb(&grid, 1.19).unwrap();
    let (state, _) = imaginary_time_ground_state(&grid, &potential, &RelaxOptions::coarse()).unwrap();
    let edge = (grid.points() as f64 * 0.05) as usize;
    let n = grid.points();
    for i in (0..edge).chain(n - edge..n) {
        assert!(state.psi[i].norm() < 1e-8);
    }
}

#[test]
fn eigenstate_is_stationary() {
    let grid = Grid1D::new(40.0, 512).unwrap();
    let potential = Potential::soft_coulomb(&grid, 2f64.sqrt()).unwrap();
    let (mut state, e0) =
        imaginary_time_ground_state(&grid, &potential, &RelaxOptions::default()).unwrap();
    let mut op = SplitOperator::new(grid, potential, AbsorberSpec::disabled()).unwrap();
    let before = [op.norm(&state), op.momentum(&state), op.force(&state)];
    for _ in 0..1000 {
        op.step(&mut state, 0.0, 0.02);
    }
    let after = [op.norm(&state), op.momentum(&state), op.force(&state)];
    for (a, b) in before.iter().zip(&after) {
        assert!((a - b).abs() < 1e-8);
    }
    assert!((op.energy(&state) - e0).abs() < 1e-8);
}

#[test]
fn propagation_is_unitary_without_absorber() {
    let grid = Grid1D::new(60.0, 1024).unwrap();
    let potential = Potential::soft_coulomb(&grid, 1.2).unwrap();
    let (mut state, _) = imaginary_time_ground_state(&grid, &potential, &RelaxOptions::coarse()).unwrap();
    let mut op = SplitOperator::new(grid, potential, AbsorberSpec::disabled()).unwrap();
    let pulse = PulseSpec::new(0.05, 0.0569, 1).unwrap();
    let dt = 0.05;
    let mut last = op.norm(&state);
    for n in 0..2000 {
        op.step(&mut state, pulse.field((n as f64 + 0.5) * dt), dt);
        let norm = op.norm(&state);
        assert!((norm - last).abs() < 1e-12);
        last = norm;
    }
}

#[test]
fn absorber_removes_outgoing_flux() {
    let grid = Grid1D::new(40.0, 512).unwrap();
    let mut state = gaussian_guess(&grid, 2.0);
    for (c, x) in state.psi.iter_mut().zip(grid.positions()) {
        *c *= C64::from_polar(1.0, 3.0 * x);
    }
    let mut op = SplitOperator::new(grid, Potential::free(&grid), AbsorberSpec::default()).unwrap();
    for _ in 0..1000 {
        op.step(&mut state, 0.0, 0.02);
    }
    assert!(op.norm(&state) < 1e-3);
}

/// Classical `x' = p, p' = -w^2 x - E(t)` by RK4 with a fine step.
fn classical(omega: f64, field: impl Fn(f64) -> f64, x0: f64, p0: f64, t_end: f64) -> (f64, f64) {
    let steps = 200_000;
    let h = t_end / steps as f64;
    let f = |t: f64, x: f64, p: f64| (p, -omega * omega * x - field(t));
    let (mut x, mut p) = (x0, p0);
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = f(t, x, p);
        let k2 = f(t + h / 2.0, x + h / 2.0 * k1.0, p + h / 2.0 * k1.1);
        let k3 = f(t + h / 2.0, x + h / 2.0 * k2.0, p + h / 2.0 * k2.1);
        let k4 = f(t + h, x + h * k3.0, p + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (x, p)
}

#[test]
fn harmonic_means_follow_classical_motion() {
    let grid = Grid1D::new(30.0, 512).unwrap();
    let omega = 1.0;
    let field = |t: f64| 0.3 * (0.7 * t).cos();
    let t_end = 6.0;
    let (xc, pc) = classical(omega, field, 1.0, 0.0, t_end);
    let mut errors = Vec::new();
    for dt in [0.02, 0.01] {
        let psi = grid
            .positions()
            .into_iter()
            .map(|x| C64::new((-0.5 * (x - 1.0) * (x - 1.0)).exp() * std::f64::consts::PI.powf(-0.25), 0.0))
            .collect();
        let mut state = GridState { psi, time: 0.0 };
        let mut op = SplitOperator::new(grid, Potential::harmonic(&grid, omega), AbsorberSpec::disabled()).unwrap();
        let steps = (t_end / dt).round() as usize;
        for n in 0..steps {
            op.step(&mut state, field((n as f64 + 0.5) * dt), dt);
        }
        let err = (op.position(&state) - xc).abs() + (op.momentum(&state) - pc).abs();
        errors.push(err);
    }
    assert!(errors[0] < 1e-3, "{errors:?}");
    assert!(errors[0] / errors[1] > 3.5, "{errors:?}");
}

#[test]
fn momentum_of_boosted_ground_state() {
    let grid = Grid1D::new(40.0, 512).unwrap();
    let potential = Potential::soft_coulomb(&grid, 1.0).unwrap();
    let (mut state, _) = imaginary_time_ground_state(&grid, &potential, &RelaxOptions::coarse()).unwrap();
    assert!(expect_momentum(&grid, &state).unwrap().abs() < 1e-12);
    assert!(expect_force(&grid, &state, &potential).abs() < 1e-12);
    for (c, x) in state.psi.iter_mut().zip(grid.positions()) {
        *c *= C64::from_polar(1.0, 0.4 * x);
    }
    assert!((expect_momentum(&grid, &state).unwrap() - 0.4).abs() < 1e-10);
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn displaced_gaussian_force_matches_quadrature() {
    let alpha = 2f64.sqrt();
    let (x0, width) = (5.0, 0.8);
    let density = |x: f64| {
        (-(x - x0) * (x - x0) / (width * width)).exp() / (width * std::f64::consts::PI.sqrt())
    };
    let oracle = simpson(|x| density(x) * soft_coulomb_force(x, alpha), -20.0, 30.0, 200_000);

    let grid = Grid1D::new(40.0, 1024).unwrap();
    let potential = Potential::soft_coulomb(&grid, alpha).unwrap();
    let psi = grid
        .positions()
        .into_iter()
        .map(|x| C64::new(density(x).sqrt(), 0.0))
        .collect();
    let state = GridState { psi, time: 0.0 };
    let force = expect_force(&grid, &state, &potential);
    assert!((force - oracle).abs() < 1e-8, "{force} vs {oracle}");
}

fn small_numerics(dt: f64) -> AtomNumerics {
    // wide enough that no flux reaches the seam of the periodic box
    AtomNumerics {
        grid: Grid1D::new(120.0, 2048).unwrap(),
        dt,
        absorber: AbsorberSpec::disabled(),
        relax: RelaxOptions::coarse(),
    }
}

#[test]
fn zero_field_reference_is_silent() {
    let atom = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let pulse = PulseSpec::new(0.0, 0.0569, 1).unwrap();
    let run = run_atom_reference(&atom, &pulse, &small_numerics(0.05)).unwrap();
    assert!(run.response.iter().all(|y| y.abs() < 1e-10));
}

#[test]
fn reference_starts_at_rest() {
    let atom = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let pulse = PulseSpec::new(0.05, 0.0569, 2).unwrap();
    let run = run_atom_reference(&atom, &pulse, &small_numerics(0.05)).unwrap();
    assert!(run.response[0].abs() < 1e-12);
    assert!(run.response.iter().any(|y| y.abs() > 1e-4));
}

/// Max deviation between the centred difference of `<p>` and the response channel.
fn ehrenfest_defect(dt: f64) -> f64 {
    let atom = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let pulse = PulseSpec::new(0.05, 0.114, 2).unwrap();
    let numerics = small_numerics(dt);
    let grid = TimeGrid::for_pulse(&pulse, dt).unwrap();
    let mut system = AtomSystem::prepare(&atom, &numerics).unwrap();
    let run = run_open_loop(&mut system, &pulse, grid).unwrap();
    let p = run.observable("momentum").unwrap();
    (1..run.len() - 1)
        .map(|n| ((p[n + 1] - p[n - 1]) / (2.0 * grid.dt) - run.response[n]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn ehrenfest_defect_is_second_order() {
    let coarse = ehrenfest_defect(0.1);
    let fine = ehrenfest_defect(0.05);
    assert!(coarse / fine >= 3.5, "{coarse} {fine}");
}

#[test]
fn system_reports_its_observables() {
    let atom = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let mut system = AtomSystem::prepare(&atom, &small_numerics(0.05)).unwrap();
    assert_eq!(system.observable_labels(), vec!["momentum", "force", "norm"]);
    let values = system.observables().unwrap();
    assert!((values[2] - 1.0).abs() < 1e-12);
    assert!((system.ground_energy() + 0.5).abs() < 1e-3);
}

#[test]
fn doubling_the_grid_leaves_the_response_unchanged() {
    let atom = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let pulse = imposter::presets::atom_pulse();
    let coarse = run_atom_reference(&atom, &pulse, &AtomNumerics::default()).unwrap();
    let fine_numerics = AtomNumerics {
        grid: Grid1D::new(200.0, 8192).unwrap(),
        ..AtomNumerics::default()
    };
    let fine = run_atom_reference(&atom, &pulse, &fine_numerics).unwrap();
    let rms = (coarse
        .response
        .iter()
        .zip(&fine.response)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / coarse.len() as f64)
        .sqrt();
    assert!(rms < 1e-6, "{rms}");
}
