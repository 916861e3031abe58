use imposter::feedback::*;
use imposter::grid::{AbsorberSpec, AtomNumerics, AtomSystem, Grid1D, RelaxOptions};
use imposter::lattice::{run_hubbard_reference, HubbardNumerics, HubbardSystem, LatticeModel};
use imposter::{AtomSpec, Error, PulseSpec, TimeSeries};

fn atom_numerics() -> AtomNumerics {
    AtomNumerics {
        grid: Grid1D::new(80.0, 1024).unwrap(),
        dt: 0.05,
        absorber: AbsorberSpec::default(),
        relax: RelaxOptions::coarse(),
    }
}

fn atom_pulse() -> PulseSpec {
    PulseSpec::new(0.06, 0.114, 3).unwrap()
}

fn lattice_pulse() -> PulseSpec {
    PulseSpec::new(2.61, 4.43, 4).unwrap()
}

fn ring(u: f64) -> LatticeModel {
    LatticeModel::new(4, 1.0, u, 1.0).unwrap()
}

fn track_atom(reference: &AtomSpec, driven: &AtomSpec, gain: f64) -> TrackingResult {
    let numerics = atom_numerics();
    let pulse = atom_pulse();
    let y = imposter::grid::run_atom_reference(reference, &pulse, &numerics)
        .unwrap()
        .response_series();
    let mut system = AtomSystem::prepare(driven, &numerics).unwrap();
    let grid = TimeGrid::for_pulse(&pulse, numerics.dt).unwrap();
    run_tracking(&mut system, &y, &pulse, grid, &FeedbackConfig::with_gain(gain)).unwrap()
}

fn track_ring(u_ref: f64, u_dr: f64, gain: f64) -> TrackingResult {
    let numerics = HubbardNumerics::default();
    let pulse = lattice_pulse();
    let y = run_hubbard_reference(ring(u_ref), 2, 2, &pulse, &numerics)
        .unwrap()
        .response_series();
    let mut system = HubbardSystem::prepare(ring(u_dr), 2, 2, &numerics).unwrap();
    let grid = TimeGrid::for_pulse(&pulse, numerics.dt).unwrap();
    run_tracking(&mut system, &y, &pulse, grid, &FeedbackConfig::with_gain(gain)).unwrap()
}

fn assert_identity(run: &TrackingResult) {
    for n in 0..run.len() {
        if !run.guard[n] {
            let expected = run.gain * (run.response[n] - run.target[n]);
            assert!((run.control[n] - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn self_tracking_needs_no_control() {
    let h = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    let run = track_atom(&h, &h, 1000.0);
    assert!(tracking_residual(&run).value < 1e-8);
    assert!(run.control.iter().all(|u| u.abs() < 1e-8));

    let run = track_ring(3.0, 3.0, 1000.0);
    assert!(tracking_residual(&run).value < 1e-8);
    assert!(run.control.iter().all(|u| u.abs() < 1e-8));
}

#[test]
fn zero_gain_reproduces_the_open_loop() {
    let numerics = HubbardNumerics::default();
    let pulse = lattice_pulse();
    let open = run_hubbard_reference(ring(1.0), 2, 2, &pulse, &numerics).unwrap();
    let run = track_ring(10.0, 1.0, 0.0);
    assert_eq!(open.response, run.response);
    assert!(run.control.iter().all(|&u| u == 0.0));
    // the residual is then the plain open-loop mismatch
    let mismatch = relative_rms(&open.response, &run.target);
    assert_eq!(tracking_residual(&run), mismatch);
}

#[test]
fn controller_identity_holds_pointwise() {
    let ar = AtomSpec::new(0.579, 1.19).unwrap();
    let h = AtomSpec::new(0.5, 2f64.sqrt()).unwrap();
    for gain in [10.0, 1000.0] {
        assert_identity(&track_atom(&ar, &h, gain));
        assert_identity(&track_ring(10.0, 1.0, gain));
    }
}

#[test]
fn doubling_the_gain_halves_the_residual() {
    let low = tracking_residual(&track_ring(10.0, 1.0, 500.0)).value;
    let high = tracking_residual(&track_ring(10.0, 1.0, 1000.0)).value;
    let ratio = low / high;
    assert!(ratio > 1.0 && ratio < 4.0, "{ratio}");
    assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
}

#[test]
fn lattice_tracking_converges_with_gain() {
    let residuals: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&k| tracking_residual(&track_ring(10.0, 1.0, k)).value)
        .collect();
    assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2]);
    assert!(residuals[2] < 0.02);
}

#[test]
fn response_is_recorded_on_the_grid() {
    let run = track_ring(10.0, 1.0, 100.0);
    let grid = TimeGrid::for_pulse(&lattice_pulse(), 0.01).unwrap();
    assert_eq!(run.len(), grid.samples());
    assert_eq!(run.times()[grid.steps], grid.duration());
    assert!((grid.duration() - lattice_pulse().duration()).abs() < 1e-12);
    for n in 0..run.len() {
        assert!((run.total_field[n] - lattice_pulse().field(run.times()[n]) - run.control[n]).abs() < 1e-15);
        assert_eq!(run.residual[n], run.response[n] - run.target[n]);
    }
    assert!(run.guard_trips().is_empty());
}

#[test]
fn reference_grid_must_match() {
    let pulse = lattice_pulse();
    let mut system = HubbardSystem::prepare(ring(1.0), 2, 2, &HubbardNumerics::default()).unwrap();
    let grid = TimeGrid::for_pulse(&pulse, 0.01).unwrap();
    let wrong = TimeSeries::new(0.0, 0.02, vec![0.0; grid.samples()], "Y").unwrap();
    let err = run_tracking(&mut system, &wrong, &pulse, grid, &FeedbackConfig::default());
    assert!(matches!(err, Err(Error::GridMismatch(_))));
    let short = TimeSeries::new(0.0, grid.dt, vec![0.0; 10], "Y").unwrap();
    let err = run_tracking(&mut system, &short, &pulse, grid, &FeedbackConfig::default());
    assert!(matches!(err, Err(Error::GridMismatch(_))));
}

#[test]
fn residual_definitions() {
    let y = [1.0, -2.0, 0.5];
    assert_eq!(relative_rms(&y, &y).value, 0.0);
    let doubled: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
    assert!((relative_rms(&doubled, &y).value - 1.0).abs() < 1e-15);
    let r = relative_rms(&[0.3, 0.4], &[0.0, 0.0]);
    assert!(!r.relative);
    assert!((r.value - (0.125f64).sqrt()).abs() < 1e-15);
}

#[test]
fn guard_holds_the_previous_control() {
    // 1 + k_p a^2 <H_kin> vanishes for <H_kin> = -1 / (k_p a^2)
    let gain = 1000.0;
    let out = hubbard_control_field(-1.0 / gain, 0.2, 0.1, 0.0, gain, 1.0, 1e-6, 0.42);
    assert!(out.guard_tripped);
    assert_eq!(out.value, 0.42);
    let out = hubbard_control_field(0.0, 0.2, 0.1, 0.05, gain, 1.0, 1e-6, 0.42);
    assert!(!out.guard_tripped);
    assert!((out.value - gain * (0.2 - 0.05)).abs() < 1e-12);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(FeedbackConfig::with_gain(-1.0).validate().is_err());
    assert!(FeedbackConfig {
        guard_threshold: 0.0,
        ..FeedbackConfig::default()
    }
    .validate()
    .is_err());
    assert!(TimeGrid::for_pulse(&lattice_pulse(), 0.0).is_err());
}
