//! One-dimensional single-active-electron dynamics on a uniform grid.
//!
//! The electron sits in a soft-Coulomb core `V(x) = -1/sqrt(x^2 + a^2)` and
//! couples to the laser in the length gauge, `H = p^2/2 + V(x) + x E(t)`.
//! Real-time propagation uses the symmetric split-operator scheme with FFTs;
//! ground states come from imaginary-time relaxation with the same kernels.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::feedback::{self, DrivenSystem, FieldWindow, ResponseParts, TimeGrid, TrackingResult};
use crate::pulse::{AtomSpec, PulseSpec};

/// Uniform grid on `[-L, L]` with a power-of-two number of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    points: usize,
}

impl Grid1D {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be > 0, got {half_width}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid point count must be a power of two >= 8, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        -self.half_width + self.dx() * i as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.position(i)).collect()
    }

    /// Wavenumbers in FFT order; the Nyquist bin carries `-pi/dx`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points;
        let dk = 2.0 * PI / (n as f64 * self.dx());
        (0..n)
            .map(|m| {
                if m < n / 2 {
                    dk * m as f64
                } else {
                    dk * (m as f64 - n as f64)
                }
            })
            .collect()
    }
}

/// Potential samples together with the force `-V'(x)` on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
    force: Vec<f64>,
}

impl Potential {
    pub fn soft_coulomb(grid: &Grid1D, softening: f64) -> Result<Self> {
        let values = soft_coulomb_potential(grid, softening)?;
        let force = grid
            .positions()
            .into_iter()
            .map(|x| soft_coulomb_force(x, softening))
            .collect();
        Ok(Self { values, force })
    }

    /// `V = w^2 x^2 / 2`.
    pub fn harmonic(grid: &Grid1D, omega: f64) -> Self {
        let xs = grid.positions();
        Self {
            values: xs.iter().map(|x| 0.5 * omega * omega * x * x).collect(),
            force: xs.iter().map(|x| -omega * omega * x).collect(),
        }
    }

    pub fn free(grid: &Grid1D) -> Self {
        Self {
            values: vec![0.0; grid.points()],
            force: vec![0.0; grid.points()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn force(&self) -> &[f64] {
        &self.force
    }
}

pub fn soft_coulomb_potential(grid: &Grid1D, softening: f64) -> Result<Vec<f64>> {
    if !(softening > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "softening length must be > 0, got {softening}"
        )));
    }
    let a2 = softening * softening;
    Ok(grid
        .positions()
        .into_iter()
        .map(|x| -1.0 / (x * x + a2).sqrt())
        .collect())
}

/// `-V'(x) = -x / (x^2 + a^2)^(3/2)`.
pub fn soft_coulomb_force(x: f64, softening: f64) -> f64 {
    let r2 = x * x + softening * softening;
    -x / (r2 * r2.sqrt())
}

/// Cosine mask at both edges of the box, `cos(pi/2 s)^exponent` over the
/// outer `fraction` of the full box width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberSpec {
    pub fraction: f64,
    pub exponent: f64,
}

impl Default for AbsorberSpec {
    fn default() -> Self {
        Self {
            fraction: 0.1,
            exponent: 0.125,
        }
    }
}

impl AbsorberSpec {
    pub fn disabled() -> Self {
        Self {
            fraction: 0.0,
            exponent: 0.125,
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.fraction > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.fraction) {
            return Err(Error::InvalidParameter(format!(
                "absorber fraction must lie in [0, 0.5), got {}",
                self.fraction
            )));
        }
        if !(self.exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "absorber exponent must be > 0, got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    pub fn mask(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        let width = self.fraction * 2.0 * grid.half_width();
        let inner = grid.half_width() - width;
        Ok(grid
            .positions()
            .into_iter()
            .map(|x| {
                let depth = x.abs() - inner;
                if width == 0.0 || depth <= 0.0 {
                    1.0
                } else if depth >= width {
                    0.0
                } else {
                    (0.5 * PI * depth / width).cos().powf(self.exponent)
                }
            })
            .collect())
    }
}

/// Wavefunction samples at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub psi: Vec<Complex64>,
    pub time: f64,
}

impl GridState {
    pub fn norm(&self, grid: &Grid1D) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx()
    }
}

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    fn new(points: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    fn forward(&mut self, data: &mut [Complex64]) {
        self.forward.process_with_scratch(data, &mut self.scratch);
    }

    /// Unnormalized inverse transform.
    fn inverse(&mut self, data: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, &mut self.scratch);
    }
}

/// Split-operator propagator for `p^2/2 + V(x) + x E`.
pub struct SplitOperator {
    grid: Grid1D,
    potential: Potential,
    positions: Vec<f64>,
    wavenumbers: Vec<f64>,
    mask: Option<Vec<f64>>,
    spectral: Spectral,
    work: Vec<Complex64>,
    kinetic_dt: f64,
    kinetic_phase: Vec<Complex64>,
}

impl SplitOperator {
    pub fn new(grid: Grid1D, potential: Potential, absorber: AbsorberSpec) -> Result<Self> {
        if potential.values.len() != grid.points() {
            return Err(Error::InvalidParameter(format!(
                "potential has {} samples, grid has {}",
                potential.values.len(),
                grid.points()
            )));
        }
        let mask = if absorber.is_enabled() {
            Some(absorber.mask(&grid)?)
        } else {
            absorber.validate()?;
            None
        };
        Ok(Self {
            positions: grid.positions(),
            wavenumbers: grid.wavenumbers(),
            spectral: Spectral::new(grid.points()),
            work: vec![Complex64::new(0.0, 0.0); grid.points()],
            grid,
            potential,
            mask,
            kinetic_dt: f64::NAN,
            kinetic_phase: Vec::new(),
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    fn refresh_kinetic(&mut self, dt: f64) {
        if self.kinetic_dt == dt {
            return;
        }
        let scale = 1.0 / self.grid.points() as f64;
        self.kinetic_phase = self
            .wavenumbers
            .iter()
            .map(|k| Complex64::from_polar(scale, -0.5 * k * k * dt))
            .collect();
        self.kinetic_dt = dt;
    }

    fn potential_half_step(&self, psi: &mut [Complex64], field: f64, dt: f64, masked: bool) {
        let half = 0.5 * dt;
        let v = &self.potential.values;
        let x = &self.positions;
        match (&self.mask, masked) {
            (Some(mask), true) => {
                for i in 0..psi.len() {
                    let (s, c) = (-(v[i] + x[i] * field) * half).sin_cos();
                    psi[i] *= Complex64::new(c * mask[i], s * mask[i]);
                }
            }
            _ => {
                for i in 0..psi.len() {
                    let (s, c) = (-(v[i] + x[i] * field) * half).sin_cos();
                    psi[i] *= Complex64::new(c, s);
                }
            }
        }
    }

    /// Advance `state` by `dt` under the constant field `field`, then apply the absorber.
    pub fn step(&mut self, state: &mut GridState, field: f64, dt: f64) {
        self.refresh_kinetic(dt);
        let psi = &mut state.psi;
        self.potential_half_step(psi, field, dt, false);
        self.spectral.forward(psi);
        for (c, k) in psi.iter_mut().zip(&self.kinetic_phase) {
            *c *= k;
        }
        self.spectral.inverse(psi);
        self.potential_half_step(psi, field, dt, true);
        state.time += dt;
    }

    pub fn norm(&self, state: &GridState) -> f64 {
        state.norm(&self.grid)
    }

    /// `<p>` from the momentum-space density (Nyquist bin excluded).
    pub fn momentum(&mut self, state: &GridState) -> f64 {
        self.work.copy_from_slice(&state.psi);
        self.spectral.forward(&mut self.work);
        let nyquist = self.grid.points() / 2;
        let weight = self.grid.dx() / self.grid.points() as f64;
        self.work
            .iter()
            .zip(&self.wavenumbers)
            .enumerate()
            .filter(|(m, _)| *m != nyquist)
            .map(|(_, (c, k))| k * c.norm_sqr())
            .sum::<f64>()
            * weight
    }

    /// `<F> = <-V'(x)>`.
    pub fn force(&self, state: &GridState) -> f64 {
        expect_local(&self.grid, state, &self.potential.force)
    }

    pub fn position(&self, state: &GridState) -> f64 {
        expect_local(&self.grid, state, &self.positions)
    }

    /// Field-free `H psi`.
    pub fn apply_hamiltonian(&mut self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.grid.points() as f64;
        self.work.copy_from_slice(psi);
        self.spectral.forward(&mut self.work);
        for (c, k) in self.work.iter_mut().zip(&self.wavenumbers) {
            *c *= 0.5 * k * k / n;
        }
        self.spectral.inverse(&mut self.work);
        for i in 0..psi.len() {
            out[i] = self.work[i] + psi[i] * self.potential.values[i];
        }
    }

    /// Field-free energy `<H> / <psi|psi>`.
    pub fn energy(&mut self, state: &GridState) -> f64 {
        let mut h_psi = vec![Complex64::new(0.0, 0.0); state.psi.len()];
        self.apply_hamiltonian(&state.psi, &mut h_psi);
        let num: f64 = state
            .psi
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let den: f64 = state.psi.iter().map(|c| c.norm_sqr()).sum();
        num / den
    }

    /// `|| H psi - E psi ||` for a normalized state, with `E` its Rayleigh quotient.
    pub fn eigen_residual(&mut self, state: &GridState) -> f64 {
        let energy = self.energy(state);
        let mut h_psi = vec![Complex64::new(0.0, 0.0); state.psi.len()];
        self.apply_hamiltonian(&state.psi, &mut h_psi);
        let sq: f64 = h_psi
            .iter()
            .zip(&state.psi)
            .map(|(h, p)| (h - p * energy).norm_sqr())
            .sum();
        (sq * self.grid.dx()).sqrt()
    }

    fn imaginary_step(&mut self, psi: &mut [Complex64], decay_v: &[f64], decay_k: &[f64]) {
        for (c, d) in psi.iter_mut().zip(decay_v) {
            *c *= *d;
        }
        self.spectral.forward(psi);
        for (c, d) in psi.iter_mut().zip(decay_k) {
            *c *= *d;
        }
        self.spectral.inverse(psi);
        for (c, d) in psi.iter_mut().zip(decay_v) {
            *c *= *d;
        }
        let norm = (psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt();
        for c in psi.iter_mut() {
            *c /= norm;
        }
    }

    /// Relax `state` in imaginary time; returns the final energy.
    pub fn relax(&mut self, state: &mut GridState, options: &RelaxOptions) -> Result<f64> {
        if options.schedule.is_empty() {
            return Err(Error::InvalidParameter("empty imaginary-time schedule".into()));
        }
        let n = self.grid.points() as f64;
        let mut energy = self.energy(state);
        for &tau in &options.schedule {
            // shift keeps the decay factors bounded for deep potentials
            let shift = self
                .potential
                .values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let decay_v: Vec<f64> = self
                .potential
                .values
                .iter()
                .map(|v| (-(v - shift) * 0.5 * tau).exp())
                .collect();
            let decay_k: Vec<f64> = self
                .wavenumbers
                .iter()
                .map(|k| (-0.5 * k * k * tau).exp() / n)
                .collect();
            let mut converged = false;
            let mut steps = 0;
            while steps < options.max_steps {
                for _ in 0..options.check_every {
                    self.imaginary_step(&mut state.psi, &decay_v, &decay_k);
                }
                steps += options.check_every;
                let next = self.energy(state);
                let per_step = (next - energy).abs() / options.check_every as f64;
                energy = next;
                if per_step < options.tolerance * energy.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Convergence {
                    iterations: steps,
                    residual: self.eigen_residual(state),
                });
            }
        }
        Ok(energy)
    }
}

fn expect_local(grid: &Grid1D, state: &GridState, weights: &[f64]) -> f64 {
    state
        .psi
        .iter()
        .zip(weights)
        .map(|(c, w)| c.norm_sqr() * w)
        .sum::<f64>()
        * grid.dx()
}

/// `<p>` of `state` on `grid`.
pub fn expect_momentum(grid: &Grid1D, state: &GridState) -> Result<f64> {
    let mut op = SplitOperator::new(*grid, Potential::free(grid), AbsorberSpec::disabled())?;
    Ok(op.momentum(state))
}

/// `<-V'(x)>` for the given potential.
pub fn expect_force(grid: &Grid1D, state: &GridState, potential: &Potential) -> f64 {
    expect_local(grid, state, potential.force())
}

/// Imaginary-time relaxation settings.
///
/// Each entry of `schedule` is an imaginary step run until the energy changes
/// by less than `tolerance` (relative) per step. Shrinking steps remove the
/// splitting bias of the earlier, faster stages.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxOptions {
    pub schedule: Vec<f64>,
    pub tolerance: f64,
    pub max_steps: usize,
    pub check_every: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            schedule: vec![0.1, 0.01, 0.002],
            tolerance: 1e-12,
            max_steps: 400_000,
            check_every: 10,
        }
    }
}

impl RelaxOptions {
    /// Cheaper settings, accurate to roughly 1e-7 in energy.
    pub fn coarse() -> Self {
        Self {
            schedule: vec![0.1, 0.02],
            tolerance: 1e-11,
            ..Self::default()
        }
    }
}

/// Normalized real Gaussian centred on the origin.
pub fn gaussian_guess(grid: &Grid1D, width: f64) -> GridState {
    let mut psi: Vec<Complex64> = grid
        .positions()
        .into_iter()
        .map(|x| Complex64::new((-0.5 * x * x / (width * width)).exp(), 0.0))
        .collect();
    let norm = (psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
    for c in psi.iter_mut() {
        *c /= norm;
    }
    GridState { psi, time: 0.0 }
}

/// Normalized ground state and its energy by imaginary-time relaxation.
pub fn imaginary_time_ground_state(
    grid: &Grid1D,
    potential: &Potential,
    options: &RelaxOptions,
) -> Result<(GridState, f64)> {
    let mut op = SplitOperator::new(*grid, potential.clone(), AbsorberSpec::disabled())?;
    let mut state = gaussian_guess(grid, 1.0_f64.max(grid.half_width() / 8.0).min(4.0));
    let energy = op.relax(&mut state, options)?;
    Ok((state, energy))
}

/// Softening length whose soft-Coulomb ground state is bound by `target_ip`.
///
/// Bisection on `a`: the ground energy rises monotonically with the softening.
pub fn calibrate_softening(target_ip: f64, grid: &Grid1D) -> Result<f64> {
    if !(target_ip > 0.2 && target_ip < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "target ionization potential must lie in (0.2, 2.0) a.u., got {target_ip}"
        )));
    }
    calibrate_softening_in(target_ip, grid, (0.2, 6.0))
}

/// Bisection inside an explicit bracket.
pub fn calibrate_softening_in(target_ip: f64, grid: &Grid1D, bracket: (f64, f64)) -> Result<f64> {
    const ENERGY_TOL: f64 = 1e-5;
    let options = RelaxOptions::coarse();
    let mut state = gaussian_guess(grid, 1.0);
    let ground = |softening: f64, state: &mut GridState| -> Result<f64> {
        let mut op = SplitOperator::new(
            *grid,
            Potential::soft_coulomb(grid, softening)?,
            AbsorberSpec::disabled(),
        )?;
        op.relax(state, &options)
    };

    let (mut lo, mut hi) = bracket;
    let e_lo = ground(lo, &mut state)?;
    let e_hi = ground(hi, &mut state)?;
    if !(e_lo < -target_ip && e_hi > -target_ip) {
        return Err(Error::Calibration(format!(
            "softening bracket [{lo}, {hi}] gives energies [{e_lo}, {e_hi}], which do not enclose {}",
            -target_ip
        )));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let e_mid = ground(mid, &mut state)?;
        if (e_mid + target_ip).abs() < ENERGY_TOL {
            return Ok(mid);
        }
        if e_mid < -target_ip {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Calibration(format!(
        "bisection stalled in [{lo}, {hi}] for target {target_ip}"
    )))
}

/// Discretization of an atom run.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomNumerics {
    pub grid: Grid1D,
    pub dt: f64,
    pub absorber: AbsorberSpec,
    pub relax: RelaxOptions,
}

impl Default for AtomNumerics {
    fn default() -> Self {
        Self {
            grid: Grid1D::new(200.0, 4096).expect("default grid is valid"),
            dt: 0.02,
            absorber: AbsorberSpec::default(),
            relax: RelaxOptions::default(),
        }
    }
}

/// An atom on the grid, tracked through `d<p>/dt = <F> - E`.
pub struct AtomSystem {
    propagator: SplitOperator,
    state: GridState,
    ground_energy: f64,
}

impl AtomSystem {
    /// Prepare the ground state of `atom` on the numerics grid.
    pub fn prepare(atom: &AtomSpec, numerics: &AtomNumerics) -> Result<Self> {
        let potential = Potential::soft_coulomb(&numerics.grid, atom.softening)?;
        Self::with_potential(potential, numerics)
    }

    pub fn with_potential(potential: Potential, numerics: &AtomNumerics) -> Result<Self> {
        let (state, ground_energy) =
            imaginary_time_ground_state(&numerics.grid, &potential, &numerics.relax)?;
        let propagator = SplitOperator::new(numerics.grid, potential, numerics.absorber)?;
        Ok(Self {
            propagator,
            state,
            ground_energy,
        })
    }

    /// Start from an arbitrary state instead of the ground state.
    pub fn from_state(propagator: SplitOperator, state: GridState) -> Self {
        Self {
            propagator,
            state,
            ground_energy: f64::NAN,
        }
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn state(&self) -> &GridState {
        &self.state
    }

    pub fn propagator_mut(&mut self) -> &mut SplitOperator {
        &mut self.propagator
    }

    /// Field-free energy of the current state.
    pub fn energy(&mut self) -> f64 {
        self.propagator.energy(&self.state)
    }

    pub fn norm(&self) -> f64 {
        self.propagator.norm(&self.state)
    }
}

impl DrivenSystem for AtomSystem {
    fn response_parts(&mut self) -> Result<ResponseParts> {
        Ok(ResponseParts {
            drift: self.propagator.force(&self.state),
            coupling: -1.0,
        })
    }

    fn advance(&mut self, window: &FieldWindow) -> Result<()> {
        let field = window.tl_mid + window.control;
        self.propagator.step(&mut self.state, field, window.dt);
        Ok(())
    }

    fn observable_labels(&self) -> Vec<&'static str> {
        vec!["momentum", "force", "norm"]
    }

    fn observables(&mut self) -> Result<Vec<f64>> {
        Ok(vec![
            self.propagator.momentum(&self.state),
            self.propagator.force(&self.state),
            self.propagator.norm(&self.state),
        ])
    }
}

/// Open-loop reference run; the response channel is `Y(t) = <F> - E_tl(t)`.
pub fn run_atom_reference(
    atom: &AtomSpec,
    pulse: &PulseSpec,
    numerics: &AtomNumerics,
) -> Result<TrackingResult> {
    let grid = TimeGrid::for_pulse(pulse, numerics.dt)?;
    let mut system = AtomSystem::prepare(atom, numerics)?;
    feedback::run_open_loop(&mut system, pulse, grid)
}
