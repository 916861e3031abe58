//! Conversions used at the configuration boundary.
//!
//! Atom runs use Hartree atomic units; lattice runs measure energy in the
//! hopping `t0`, time in `hbar/t0` and length in the lattice spacing, so a
//! field enters as the dimensionless bond voltage `e a E / t0`.

use std::f64::consts::PI;

/// Hartree energy in eV.
pub const HARTREE_EV: f64 = 27.211_386_245_988;
/// Atomic unit of field strength in MV/cm.
pub const AU_FIELD_MV_PER_CM: f64 = 5.142_206_747_63e3;
/// Bohr radius in Angstrom.
pub const BOHR_ANGSTROM: f64 = 0.529_177_210_903;
/// Atomic unit of time in fs.
pub const AU_TIME_FS: f64 = 2.418_884_326_585_7e-2;
/// Reduced Planck constant in eV s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

pub fn ev_to_au(energy_ev: f64) -> f64 {
    energy_ev / HARTREE_EV
}

pub fn au_to_ev(energy_au: f64) -> f64 {
    energy_au * HARTREE_EV
}

/// Cyclic frequency in THz to angular frequency in rad/fs.
pub fn thz_to_rad_per_fs(freq_thz: f64) -> f64 {
    2.0 * PI * freq_thz * 1e-3
}

/// Cyclic frequency in THz to angular frequency in atomic units.
pub fn thz_to_au(freq_thz: f64) -> f64 {
    thz_to_rad_per_fs(freq_thz) * AU_TIME_FS
}

pub fn mv_per_cm_to_au(field: f64) -> f64 {
    field / AU_FIELD_MV_PER_CM
}

pub fn au_to_mv_per_cm(field_au: f64) -> f64 {
    field_au * AU_FIELD_MV_PER_CM
}

pub fn angstrom_to_au(length: f64) -> f64 {
    length / BOHR_ANGSTROM
}

/// `hbar omega / t0` for a cyclic frequency in THz and hopping in eV.
pub fn lattice_frequency(freq_thz: f64, hopping_ev: f64) -> f64 {
    2.0 * PI * freq_thz * 1e12 * HBAR_EV_S / hopping_ev
}

/// `e a E / t0` for a field in MV/cm, spacing in Angstrom and hopping in eV.
pub fn lattice_field(field_mv_per_cm: f64, spacing_angstrom: f64, hopping_ev: f64) -> f64 {
    // 1 MV/cm = 0.01 V/Angstrom
    field_mv_per_cm * 0.01 * spacing_angstrom / hopping_ev
}

/// Duration of one lattice time unit `hbar/t0`, in fs.
pub fn lattice_time_fs(hopping_ev: f64) -> f64 {
    HBAR_EV_S / hopping_ev * 1e15
}
