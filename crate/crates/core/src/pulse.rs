//! Transform-limited driving pulses, Peierls phase accumulation and the
//! strong-field scaling laws used for intensity matching.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Classical three-step cutoff coefficient in `3.17 U_p + I_p`.
pub const CUTOFF_COEFFICIENT: f64 = 3.17;
/// Prefactor of the cutoff-matching field `F' = 1.12 w sqrt(W_max - I_p')`.
///
/// Kept as printed; the exact inverse of the cutoff law would be
/// `2/sqrt(3.17) = 1.1233`, so matched cutoffs land 0.6% short of target.
pub const HHG_MATCH_COEFFICIENT: f64 = 1.12;

/// Monochromatic carrier under a `sin^2` envelope, `E0 cos(w t) sin^2(pi t / T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    amplitude: f64,
    omega: f64,
    cycles: u32,
}

impl PulseSpec {
    pub fn new(amplitude: f64, omega: f64, cycles: u32) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse amplitude must be >= 0, got {amplitude}"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "carrier frequency must be > 0, got {omega}"
            )));
        }
        if cycles == 0 {
            return Err(Error::InvalidParameter("cycle count must be >= 1".into()));
        }
        Ok(Self {
            amplitude,
            omega,
            cycles,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn cycles(&self) -> u32 {
        self.cycles
    }

    /// Total duration `T = 2 pi N / w`.
    pub fn duration(&self) -> f64 {
        2.0 * PI * f64::from(self.cycles) / self.omega
    }

    /// Field at time `t`; exactly zero outside `[0, T]`.
    pub fn field(&self, t: f64) -> f64 {
        let duration = self.duration();
        if !(0.0..=duration).contains(&t) {
            return 0.0;
        }
        let envelope = (PI * t / duration).sin();
        self.amplitude * (self.omega * t).cos() * envelope * envelope
    }

    /// Same pulse with a different amplitude.
    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        Self::new(amplitude, self.omega, self.cycles)
    }
}

/// Evaluate the transform-limited field.
pub fn evaluate_tl_field(t: f64, spec: &PulseSpec) -> f64 {
    spec.field(t)
}

/// Single-active-electron atom: ionization potential and the softening length
/// of its `-1/sqrt(x^2 + a^2)` core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    pub ionization_potential: f64,
    pub softening: f64,
}

impl AtomSpec {
    pub fn new(ionization_potential: f64, softening: f64) -> Result<Self> {
        if !(ionization_potential > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ionization potential must be > 0, got {ionization_potential}"
            )));
        }
        if !(softening > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "softening length must be > 0, got {softening}"
            )));
        }
        Ok(Self {
            ionization_potential,
            softening,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongFieldScales {
    pub ponderomotive: f64,
    pub cutoff: f64,
}

impl StrongFieldScales {
    pub fn new(field: f64, omega: f64, ionization_potential: f64) -> Result<Self> {
        let ponderomotive = ponderomotive_energy(field, omega)?;
        Ok(Self {
            ponderomotive,
            cutoff: CUTOFF_COEFFICIENT * ponderomotive + ionization_potential,
        })
    }

    pub fn cutoff_order(&self, omega: f64) -> f64 {
        self.cutoff / omega
    }
}

/// `U_p = (F / 2w)^2`.
pub fn ponderomotive_energy(field: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    let quiver = field / (2.0 * omega);
    Ok(quiver * quiver)
}

/// HHG cutoff `3.17 U_p + I_p`.
pub fn hhg_cutoff(field: f64, omega: f64, ionization_potential: f64) -> Result<f64> {
    if !(ionization_potential > 0.0) {
        return Err(Error::Domain(format!(
            "ionization potential must be > 0, got {ionization_potential}"
        )));
    }
    Ok(CUTOFF_COEFFICIENT * ponderomotive_energy(field, omega)? + ionization_potential)
}

/// Field that gives an atom with `ip_new` the cutoff `cutoff` at frequency `omega`.
pub fn hhg_matched_field(omega: f64, cutoff: f64, ip_new: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    if cutoff < ip_new {
        return Err(Error::Infeasible(format!(
            "cutoff {cutoff} lies below the new ionization potential {ip_new}"
        )));
    }
    Ok(HHG_MATCH_COEFFICIENT * omega * (cutoff - ip_new).sqrt())
}

/// Field that keeps `U_p + I_p` fixed when the ionization potential changes to
/// `ip_new`, which pins the above-threshold ionization peak positions.
pub fn ati_matched_field(omega: f64, field: f64, ip: f64, ip_new: f64) -> Result<f64> {
    let budget = ponderomotive_energy(field, omega)? + ip - ip_new;
    if budget < 0.0 {
        return Err(Error::Infeasible(format!(
            "U_p + I_p = {} is below the new ionization potential {ip_new}",
            budget + ip_new
        )));
    }
    Ok(2.0 * omega * budget.sqrt())
}

/// Change of the Peierls phase over one step: trapezoid rule for the
/// transform-limited field plus the exact integral of a held control.
pub fn phase_increment(spacing: f64, dt: f64, tl_start: f64, tl_end: f64, held_control: f64) -> f64 {
    -spacing * dt * (0.5 * (tl_start + tl_end) + held_control)
}

/// Running Peierls phase `Phi(t) = -a int_0^t E(t') dt'`, accumulated step by
/// step on the propagation grid.
///
/// The transform-limited part is integrated with the trapezoid rule; a
/// control field held constant over a step contributes its exact integral.
#[derive(Debug, Clone)]
pub struct PeierlsPhase {
    spacing: f64,
    dt: f64,
    phases: Vec<f64>,
}

impl PeierlsPhase {
    pub fn new(spacing: f64, dt: f64) -> Self {
        Self {
            spacing,
            dt,
            phases: vec![0.0],
        }
    }

    pub fn current(&self) -> f64 {
        *self.phases.last().expect("phase history is never empty")
    }

    pub fn history(&self) -> &[f64] {
        &self.phases
    }

    /// Advance one step; returns the phase at the end of the step.
    pub fn push_step(&mut self, tl_start: f64, tl_end: f64, held_control: f64) -> f64 {
        let next = self.current() + phase_increment(self.spacing, self.dt, tl_start, tl_end, held_control);
        self.phases.push(next);
        next
    }

    /// Phase at time `t`, linearly interpolated between steps.
    pub fn at(&self, t: f64) -> Result<f64> {
        let end = self.dt * (self.phases.len() - 1) as f64;
        let slack = 1e-9 * self.dt;
        if !(t >= -slack && t <= end + slack) {
            return Err(Error::OutOfHistory { t, end });
        }
        let pos = (t / self.dt).clamp(0.0, (self.phases.len() - 1) as f64);
        let i = pos.floor() as usize;
        if i + 1 >= self.phases.len() {
            return Ok(self.current());
        }
        let frac = pos - i as f64;
        Ok(self.phases[i] * (1.0 - frac) + self.phases[i + 1] * frac)
    }
}

/// `Phi(t) = -a int_0^t [E_tl + u] dt'` by the trapezoid rule over the samples
/// of `control` (which must start at `t = 0`).
pub fn peierls_phase(t: f64, spec: &PulseSpec, spacing: f64, control: &TimeSeries) -> Result<f64> {
    let dt = control.step();
    let end = control.end_time();
    if control.start().abs() > 1e-12 * dt {
        return Err(Error::GridMismatch(format!(
            "control history must start at t = 0, starts at {}",
            control.start()
        )));
    }
    if !(t >= 0.0 && t <= end + 1e-9 * dt) {
        return Err(Error::OutOfHistory { t, end });
    }
    let total = |i: usize| spec.field(control.time(i)) + control.values()[i];
    let pos = t / dt;
    let whole = (pos.floor() as usize).min(control.len() - 1);
    let mut integral = 0.0;
    for i in 0..whole {
        integral += 0.5 * dt * (total(i) + total(i + 1));
    }
    let rest = t - control.time(whole);
    if rest > 1e-12 * dt && whole + 1 < control.len() {
        // linear interpolation of the integrand inside the last partial step
        let f0 = total(whole);
        let f1 = total(whole + 1);
        let f_t = f0 + (f1 - f0) * rest / dt;
        integral += 0.5 * rest * (f0 + f_t);
    }
    Ok(-spacing * integral)
}
