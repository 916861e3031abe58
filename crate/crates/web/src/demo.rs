//! Plain-Rust side of the browser demo, independent of the JS bindings.

use imposter::feedback::{run_tracking, tracking_residual, FeedbackConfig, TimeGrid};
use imposter::lattice::{run_hubbard_reference, HubbardNumerics, HubbardSystem, LatticeModel};
use imposter::pulse::{ati_matched_field, hhg_cutoff, hhg_matched_field, PeierlsPhase};
use imposter::{Error, PulseSpec, Result};

/// Largest ring the page offers; bigger sectors are too slow for a click.
pub const MAX_DEMO_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub t: Vec<f64>,
    pub field: Vec<f64>,
    pub phase: Vec<f64>,
}

/// Sampled field and Peierls phase (unit spacing) of a sin^2 pulse.
pub fn pulse_curve(amplitude: f64, omega: f64, cycles: u32, samples: usize) -> Result<Curve> {
    let pulse = PulseSpec::new(amplitude, omega, cycles)?;
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let dt = pulse.duration() / (samples - 1) as f64;
    let t: Vec<f64> = (0..samples).map(|n| n as f64 * dt).collect();
    let field: Vec<f64> = t.iter().map(|&t| pulse.field(t)).collect();
    let mut phase = PeierlsPhase::new(1.0, dt);
    for w in field.windows(2) {
        phase.push_step(w[0], w[1], 0.0);
    }
    Ok(Curve {
        t,
        field,
        phase: phase.history().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matching {
    /// Cutoff energy of the original atom.
    pub cutoff: f64,
    pub cutoff_order: f64,
    /// Field giving the new atom the same cutoff; NaN when no field can.
    pub hhg_field: f64,
    /// Field keeping `U_p + I_p`; NaN when no field can.
    pub ati_field: f64,
}

pub fn match_intensity(omega: f64, field: f64, ip: f64, ip_new: f64) -> Result<Matching> {
    let cutoff = hhg_cutoff(field, omega, ip)?;
    let feasible = |r: Result<f64>| match r {
        Err(Error::Infeasible(_)) => Ok(f64::NAN),
        other => other,
    };
    let hhg_field = feasible(hhg_matched_field(omega, cutoff, ip_new))?;
    let ati_field = feasible(ati_matched_field(omega, field, ip, ip_new))?;
    Ok(Matching {
        cutoff,
        cutoff_order: cutoff / omega,
        hhg_field,
        ati_field,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingTracking {
    pub t: Vec<f64>,
    pub reference: Vec<f64>,
    pub response: Vec<f64>,
    pub control: Vec<f64>,
    pub residual: f64,
    pub guard_trips: usize,
}

/// Half-filled ring with interaction `u_driven` tracking one with `u_reference`
/// under a pulse given in units of the hopping.
pub fn track_ring(
    sites: usize,
    u_reference: f64,
    u_driven: f64,
    gain: f64,
    pulse: &PulseSpec,
) -> Result<RingTracking> {
    if !(2..=MAX_DEMO_SITES).contains(&sites) {
        return Err(Error::InvalidParameter(format!(
            "the demo runs 2..={MAX_DEMO_SITES} sites, got {sites}"
        )));
    }
    let numerics = HubbardNumerics::default();
    let (n_up, n_down) = (sites / 2, sites / 2);
    let model = |u| LatticeModel::new(sites, 1.0, u, 1.0);
    let reference = run_hubbard_reference(model(u_reference)?, n_up, n_down, pulse, &numerics)?;
    let grid = TimeGrid::for_pulse(pulse, numerics.dt)?;
    let mut system = HubbardSystem::prepare(model(u_driven)?, n_up, n_down, &numerics)?;
    let run = run_tracking(
        &mut system,
        &reference.response_series(),
        pulse,
        grid,
        &FeedbackConfig::with_gain(gain),
    )?;
    Ok(RingTracking {
        t: run.times(),
        residual: tracking_residual(&run).value,
        guard_trips: run.guard_trips().len(),
        reference: run.target,
        response: run.response,
        control: run.control,
    })
}
