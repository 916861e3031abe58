//! WebAssembly bindings for the demo page in `www/`.

use wasm_bindgen::prelude::*;

pub mod demo;

use imposter::presets::{LatticeExperiment, LATTICE_RING};
use imposter::PulseSpec;

fn js(e: imposter::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(getter_with_clone)]
pub struct PulseCurve {
    pub t: Vec<f64>,
    pub field: Vec<f64>,
    pub phase: Vec<f64>,
}

/// Field and Peierls phase of a sin^2 pulse, `samples` points over its duration.
#[wasm_bindgen(js_name = pulseCurve)]
pub fn pulse_curve(amplitude: f64, omega: f64, cycles: u32, samples: usize) -> Result<PulseCurve, JsError> {
    let c = demo::pulse_curve(amplitude, omega, cycles, samples).map_err(js)?;
    Ok(PulseCurve {
        t: c.t,
        field: c.field,
        phase: c.phase,
    })
}

#[wasm_bindgen]
pub struct Matching {
    pub cutoff: f64,
    #[wasm_bindgen(js_name = cutoffOrder)]
    pub cutoff_order: f64,
    #[wasm_bindgen(js_name = hhgField)]
    pub hhg_field: f64,
    #[wasm_bindgen(js_name = atiField)]
    pub ati_field: f64,
}

#[wasm_bindgen(js_name = matchIntensity)]
pub fn match_intensity(omega: f64, field: f64, ip: f64, ip_new: f64) -> Result<Matching, JsError> {
    let m = demo::match_intensity(omega, field, ip, ip_new).map_err(js)?;
    Ok(Matching {
        cutoff: m.cutoff,
        cutoff_order: m.cutoff_order,
        hhg_field: m.hhg_field,
        ati_field: m.ati_field,
    })
}

#[wasm_bindgen(getter_with_clone)]
pub struct RingTracking {
    pub t: Vec<f64>,
    pub reference: Vec<f64>,
    pub response: Vec<f64>,
    pub control: Vec<f64>,
    pub residual: f64,
    #[wasm_bindgen(js_name = guardTrips)]
    pub guard_trips: usize,
}

/// Standard lattice pulse in units of the hopping: `[amplitude, omega, cycles]`.
#[wasm_bindgen(js_name = latticePulse)]
pub fn lattice_pulse(cycles: u32) -> Result<Vec<f64>, JsError> {
    let p = LatticeExperiment { cycles, ..LATTICE_RING }.pulse().map_err(js)?;
    Ok(vec![p.amplitude(), p.omega(), p.cycles() as f64])
}

#[wasm_bindgen(js_name = trackRing)]
pub fn track_ring(
    sites: usize,
    u_reference: f64,
    u_driven: f64,
    gain: f64,
    amplitude: f64,
    omega: f64,
    cycles: u32,
) -> Result<RingTracking, JsError> {
    let pulse = PulseSpec::new(amplitude, omega, cycles).map_err(js)?;
    let r = demo::track_ring(sites, u_reference, u_driven, gain, &pulse).map_err(js)?;
    Ok(RingTracking {
        t: r.t,
        reference: r.reference,
        response: r.response,
        control: r.control,
        residual: r.residual,
        guard_trips: r.guard_trips,
    })
}
