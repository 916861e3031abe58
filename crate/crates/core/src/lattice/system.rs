use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::basis::build_sector_basis;
use super::krylov::{expm_step, ground_state, KrylovOptions, LanczosOptions};
use super::operators::HubbardOperators;
use super::LatticeModel;
use crate::error::{Error, Result};
use crate::feedback::{self, DrivenSystem, FieldWindow, ResponseParts, TimeGrid, TrackingResult};
use crate::pulse::{phase_increment, PulseSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardNumerics {
    pub dt: f64,
    pub krylov: KrylovOptions,
    pub lanczos: LanczosOptions,
}

impl Default for HubbardNumerics {
    fn default() -> Self {
        Self {
            dt: 0.01,
            krylov: KrylovOptions::default(),
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Deterministic real start vector for Lanczos.
fn start_vector(dimension: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dimension)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, 0.0))
        .collect()
}

/// Hubbard ring driven through its Peierls phase, tracked via
/// `d<J>/dt = i<[H, J]> - a^2 E <H_kin>`.
pub struct HubbardSystem {
    ops: HubbardOperators,
    psi: Vec<Complex64>,
    phase: f64,
    krylov: KrylovOptions,
    ground_energy: f64,
}

const MAX_HALVINGS: u32 = 10;

impl HubbardSystem {
    /// Ground state at zero phase of `model` in the `(n_up, n_down)` sector.
    pub fn prepare(
        model: LatticeModel,
        n_up: usize,
        n_down: usize,
        numerics: &HubbardNumerics,
    ) -> Result<Self> {
        let basis = build_sector_basis(model.sites, n_up, n_down)?;
        let ops = HubbardOperators::new(model, basis)?;
        Self::ground(ops, numerics)
    }

    pub fn ground(ops: HubbardOperators, numerics: &HubbardNumerics) -> Result<Self> {
        let start = start_vector(ops.dimension(), numerics.lanczos.seed);
        let (psi, energy) = ground_state(
            |x, y| ops.hamiltonian_into(x, 0.0, y),
            start,
            &numerics.lanczos,
        )?;
        Ok(Self {
            ops,
            psi,
            phase: 0.0,
            krylov: numerics.krylov,
            ground_energy: energy,
        })
    }

    pub fn from_state(ops: HubbardOperators, psi: Vec<Complex64>, krylov: KrylovOptions) -> Result<Self> {
        if psi.len() != ops.dimension() {
            return Err(Error::InvalidParameter(format!(
                "state has {} amplitudes, sector has {}",
                psi.len(),
                ops.dimension()
            )));
        }
        Ok(Self {
            ops,
            psi,
            phase: 0.0,
            krylov,
            ground_energy: f64::NAN,
        })
    }

    pub fn operators(&self) -> &HubbardOperators {
        &self.ops
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// `exp(-i H(phase) dt) psi`, splitting the step when the subspace is too small.
    fn propagate(&mut self, phase_start: f64, phase_end: f64, dt: f64, depth: u32) -> Result<()> {
        let phase_mid = 0.5 * (phase_start + phase_end);
        let ops = &self.ops;
        match expm_step(
            |x, y| ops.hamiltonian_into(x, phase_mid, y),
            &self.psi,
            dt,
            &self.krylov,
        ) {
            Ok(next) => {
                self.psi = next;
                Ok(())
            }
            Err(Error::StepSize { .. }) if depth < MAX_HALVINGS => {
                self.propagate(phase_start, phase_mid, 0.5 * dt, depth + 1)?;
                self.propagate(phase_mid, phase_end, 0.5 * dt, depth + 1)
            }
            Err(e) => Err(e),
        }
    }
}

impl DrivenSystem for HubbardSystem {
    fn response_parts(&mut self) -> Result<ResponseParts> {
        let a = self.ops.model().spacing;
        let kinetic = self.ops.kinetic_of(&self.psi, self.phase);
        Ok(ResponseParts {
            drift: self.ops.commutator_of(&self.psi, self.phase),
            coupling: -a * a * kinetic,
        })
    }

    fn advance(&mut self, window: &FieldWindow) -> Result<()> {
        let a = self.ops.model().spacing;
        let start = self.phase;
        let end = start
            + phase_increment(a, window.dt, window.tl_start, window.tl_end, window.control);
        self.propagate(start, end, window.dt, 0)?;
        self.phase = end;
        Ok(())
    }

    fn observable_labels(&self) -> Vec<&'static str> {
        vec!["current", "kinetic", "phase", "norm"]
    }

    fn observables(&mut self) -> Result<Vec<f64>> {
        Ok(vec![
            self.ops.current_of(&self.psi, self.phase),
            self.ops.kinetic_of(&self.psi, self.phase),
            self.phase,
            self.psi.iter().map(|c| c.norm_sqr()).sum(),
        ])
    }
}

/// Open-loop reference run; the response channel is
/// `Y(t) = i<[H, J]> - a^2 E_tl(t) <H_kin>`.
pub fn run_hubbard_reference(
    model: LatticeModel,
    n_up: usize,
    n_down: usize,
    pulse: &PulseSpec,
    numerics: &HubbardNumerics,
) -> Result<TrackingResult> {
    let grid = TimeGrid::for_pulse(pulse, numerics.dt)?;
    let mut system = HubbardSystem::prepare(model, n_up, n_down, numerics)?;
    feedback::run_open_loop(&mut system, pulse, grid)
}
