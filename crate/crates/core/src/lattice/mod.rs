//! Periodic 1D Fermi-Hubbard ring with a time-dependent Peierls phase.
//!
//! ```text
//! H(Phi) = -t0 sum_{j,s} (e^{-i Phi} c+_{j,s} c_{j+1,s} + h.c.) + U sum_j n_{j,up} n_{j,dn}
//! J(Phi) = -i a t0 sum_{j,s} (e^{-i Phi} c+_{j,s} c_{j+1,s} - h.c.)
//! ```
//!
//! Energies are in units of `t0`'s scale as given, times in `1/energy`
//! (`hbar = 1`), and the field enters through `dPhi/dt = -a E`. With these
//! definitions `dJ/dPhi = a H_kin`, so the explicit time dependence of the
//! current contributes `<dJ/dt> = -a^2 E <H_kin>` to its Ehrenfest equation.

mod basis;
mod krylov;
mod operators;
mod system;

pub use basis::{build_sector_basis, SectorBasis, MAX_SITES};
pub use krylov::{expm_step, ground_state, KrylovOptions, LanczosOptions};
pub use operators::{HubbardOperators, ManyBodyState};
pub use system::{run_hubbard_reference, HubbardNumerics, HubbardSystem};

use crate::error::{Error, Result};

/// Ring geometry and couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub spacing: f64,
}

impl LatticeModel {
    pub fn new(sites: usize, hopping: f64, interaction: f64, spacing: f64) -> Result<Self> {
        let model = Self {
            sites,
            hopping,
            interaction,
            spacing,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 || self.sites > MAX_SITES {
            return Err(Error::InvalidParameter(format!(
                "ring needs 2..={MAX_SITES} sites, got {}",
                self.sites
            )));
        }
        if !(self.hopping > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hopping must be > 0, got {}",
                self.hopping
            )));
        }
        if !self.interaction.is_finite() {
            return Err(Error::InvalidParameter("interaction must be finite".into()));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing must be > 0, got {}",
                self.spacing
            )));
        }
        Ok(())
    }
}
