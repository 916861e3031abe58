//! Standard parameter sets.
//!
//! The atom set is an 800 nm, 10^14 W/cm^2, ten-cycle pulse acting on argon
//! (reference) and hydrogen (driven) single-active-electron atoms. The lattice
//! set is a half-filled ten-site ring driven at 375 THz, 24 MV/cm, with
//! `t0 = 0.35 eV` and `a = 3.8 Angstrom`.

use crate::error::Result;
use crate::grid::{calibrate_softening, Grid1D};
use crate::lattice::LatticeModel;
use crate::pulse::{AtomSpec, PulseSpec};
use crate::units::{lattice_field, lattice_frequency, HBAR_EV_S};

pub const ATOM_OMEGA: f64 = 0.0569;
pub const ATOM_FIELD: f64 = 0.0534;
pub const ATOM_CYCLES: u32 = 10;
pub const ARGON_IP: f64 = 0.579;
pub const HYDROGEN_IP: f64 = 0.5;
pub const DEFAULT_GAIN: f64 = 1000.0;

pub fn atom_pulse() -> PulseSpec {
    PulseSpec::new(ATOM_FIELD, ATOM_OMEGA, ATOM_CYCLES).expect("preset pulse is valid")
}

/// Atom with the softening that binds its ground state by `ionization_potential` on `grid`.
pub fn calibrated_atom(ionization_potential: f64, grid: &Grid1D) -> Result<AtomSpec> {
    let softening = calibrate_softening(ionization_potential, grid)?;
    AtomSpec::new(ionization_potential, softening)
}

/// Lattice experiment in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeExperiment {
    pub sites: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub hopping_ev: f64,
    pub spacing_angstrom: f64,
    pub frequency_thz: f64,
    pub field_mv_per_cm: f64,
    pub cycles: u32,
    pub u_reference: f64,
    pub u_driven: f64,
}

pub const LATTICE_RING: LatticeExperiment = LatticeExperiment {
    sites: 10,
    n_up: 5,
    n_down: 5,
    hopping_ev: 0.35,
    spacing_angstrom: 3.8,
    frequency_thz: 375.0,
    field_mv_per_cm: 24.0,
    cycles: 10,
    u_reference: 10.0,
    u_driven: 1.0,
};

impl LatticeExperiment {
    /// Same experiment on a smaller half-filled ring.
    pub fn with_sites(&self, sites: usize) -> Self {
        Self {
            sites,
            n_up: sites / 2,
            n_down: sites / 2,
            ..*self
        }
    }

    /// Pulse in lattice units: frequency `hbar w / t0`, amplitude `e a E / t0`.
    pub fn pulse(&self) -> Result<PulseSpec> {
        PulseSpec::new(
            lattice_field(self.field_mv_per_cm, self.spacing_angstrom, self.hopping_ev),
            lattice_frequency(self.frequency_thz, self.hopping_ev),
            self.cycles,
        )
    }

    /// Ring with unit hopping and spacing and the interaction `u_over_t0`.
    pub fn model(&self, u_over_t0: f64) -> Result<LatticeModel> {
        LatticeModel::new(self.sites, 1.0, u_over_t0, 1.0)
    }

    pub fn reference_model(&self) -> Result<LatticeModel> {
        self.model(self.u_reference)
    }

    pub fn driven_model(&self) -> Result<LatticeModel> {
        self.model(self.u_driven)
    }

    /// Length of one lattice time unit `hbar / t0` in fs.
    pub fn time_unit_fs(&self) -> f64 {
        HBAR_EV_S / self.hopping_ev * 1e15
    }
}
