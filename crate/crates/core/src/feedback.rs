//! Proportional amplifier feedback.
//!
//! For both platforms the Ehrenfest response of the tracked observable is
//! affine in the instantaneous total field,
//!
//! ```text
//! d<O>/dt = drift + coupling * (E_tl + u)
//! ```
//!
//! (atom: `drift = <F>`, `coupling = -1`; Hubbard ring: `drift = i<[H, J]>`,
//! `coupling = -a^2 <H_kin>`). Substituting into `u = k_p (d<O>/dt - Y)`
//! resolves the implicit loop in closed form:
//!
//! ```text
//! u = k_p (drift + coupling * E_tl - Y) / (1 - k_p * coupling)
//! ```
//!
//! The control is evaluated from the state at the start of each step and held
//! constant across it.

use crate::error::{Error, Result};
use crate::pulse::PulseSpec;
use crate::series::{rms, TimeSeries};

/// Decomposition `response = drift + coupling * field` at the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseParts {
    pub drift: f64,
    pub coupling: f64,
}

impl ResponseParts {
    pub fn response(&self, field: f64) -> f64 {
        self.drift + self.coupling * field
    }
}

/// Fields seen by a system over one propagation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldWindow {
    pub start: f64,
    pub dt: f64,
    pub tl_start: f64,
    pub tl_mid: f64,
    pub tl_end: f64,
    /// Control field, held constant over the step.
    pub control: f64,
}

impl FieldWindow {
    /// Split into two half steps sharing the held control.
    pub fn halves(&self, pulse: &PulseSpec) -> [FieldWindow; 2] {
        let h = 0.5 * self.dt;
        [
            FieldWindow {
                start: self.start,
                dt: h,
                tl_start: self.tl_start,
                tl_mid: pulse.field(self.start + 0.5 * h),
                tl_end: self.tl_mid,
                control: self.control,
            },
            FieldWindow {
                start: self.start + h,
                dt: h,
                tl_start: self.tl_mid,
                tl_mid: pulse.field(self.start + 1.5 * h),
                tl_end: self.tl_end,
                control: self.control,
            },
        ]
    }
}

/// A quantum system whose tracked observable can be read and which can be
/// advanced under a prescribed field.
pub trait DrivenSystem {
    /// Ehrenfest decomposition of `d<O>/dt` at the current state.
    fn response_parts(&mut self) -> Result<ResponseParts>;

    /// Propagate over one step.
    fn advance(&mut self, window: &FieldWindow) -> Result<()>;

    /// Names of the extra per-step observables, in [`DrivenSystem::observables`] order.
    fn observable_labels(&self) -> Vec<&'static str>;

    fn observables(&mut self) -> Result<Vec<f64>>;
}

/// Uniform propagation grid covering `[0, T]` with an integer number of steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Largest step not exceeding `max_dt` that divides the pulse duration.
    pub fn for_pulse(pulse: &PulseSpec, max_dt: f64) -> Result<Self> {
        if !(max_dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be > 0, got {max_dt}"
            )));
        }
        let duration = pulse.duration();
        let steps = ((duration / max_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(Self {
            dt: duration / steps as f64,
            steps,
        })
    }

    pub fn time(&self, n: usize) -> f64 {
        self.dt * n as f64
    }

    pub fn samples(&self) -> usize {
        self.steps + 1
    }

    pub fn duration(&self) -> f64 {
        self.time(self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackConfig {
    pub gain: f64,
    /// Guard trips when `|1 - k_p * coupling|` falls below this.
    pub guard_threshold: f64,
    pub output_stride: usize,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            gain: 1000.0,
            guard_threshold: 1e-6,
            output_stride: 1,
        }
    }
}

impl FeedbackConfig {
    pub fn with_gain(gain: f64) -> Self {
        Self {
            gain,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gain must be >= 0, got {}",
                self.gain
            )));
        }
        if !(self.guard_threshold > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "guard threshold must be > 0, got {}",
                self.guard_threshold
            )));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidParameter("output stride must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutcome {
    pub value: f64,
    pub guard_tripped: bool,
}

/// Closed-form proportional control for an affine response.
///
/// When the loop denominator `1 - k_p * coupling` is smaller than `threshold`
/// in magnitude, `previous` is returned and the outcome is flagged.
pub fn control_field(
    parts: ResponseParts,
    tl_field: f64,
    target: f64,
    gain: f64,
    threshold: f64,
    previous: f64,
) -> ControlOutcome {
    if gain == 0.0 {
        return ControlOutcome {
            value: 0.0,
            guard_tripped: false,
        };
    }
    let denominator = 1.0 - gain * parts.coupling;
    if denominator.abs() < threshold {
        return ControlOutcome {
            value: previous,
            guard_tripped: true,
        };
    }
    ControlOutcome {
        value: gain * (parts.response(tl_field) - target) / denominator,
        guard_tripped: false,
    }
}

/// `u = k_p / (1 + k_p) (<F> - E_tl - Y)`.
pub fn atom_control_field(force: f64, tl_field: f64, target: f64, gain: f64) -> f64 {
    gain / (1.0 + gain) * (force - tl_field - target)
}

/// `u = k_p (-a^2 E_tl <H_kin> + i<[H,J]> - Y) / (1 + k_p a^2 <H_kin>)`, guarded.
#[allow(clippy::too_many_arguments)]
pub fn hubbard_control_field(
    kinetic: f64,
    commutator: f64,
    tl_field: f64,
    target: f64,
    gain: f64,
    spacing: f64,
    threshold: f64,
    previous: f64,
) -> ControlOutcome {
    let parts = ResponseParts {
        drift: commutator,
        coupling: -spacing * spacing * kinetic,
    };
    control_field(parts, tl_field, target, gain, threshold, previous)
}

/// Scalar summary of a tracking run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// False when the target has zero RMS and `value` is the absolute RMS.
    pub relative: bool,
}

/// `RMS(response - target) / RMS(target)`, or the absolute RMS when the target vanishes.
pub fn relative_rms(response: &[f64], target: &[f64]) -> Residual {
    let diff: Vec<f64> = response.iter().zip(target).map(|(r, y)| r - y).collect();
    let scale = rms(target);
    if scale == 0.0 {
        Residual {
            value: rms(&diff),
            relative: false,
        }
    } else {
        Residual {
            value: rms(&diff) / scale,
            relative: true,
        }
    }
}

/// Per-step record of a driven run.
#[derive(Debug, Clone)]
pub struct TrackingResult {
    pub grid: TimeGrid,
    pub gain: f64,
    /// `d<O>/dt` of the driven system under `E_tl + u`.
    pub response: Vec<f64>,
    pub target: Vec<f64>,
    pub control: Vec<f64>,
    pub total_field: Vec<f64>,
    pub residual: Vec<f64>,
    pub guard: Vec<bool>,
    pub observables: Vec<(&'static str, Vec<f64>)>,
}

impl TrackingResult {
    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.grid.time(n)).collect()
    }

    pub fn guard_trips(&self) -> Vec<usize> {
        self.guard
            .iter()
            .enumerate()
            .filter_map(|(n, &g)| g.then_some(n))
            .collect()
    }

    pub fn response_series(&self) -> TimeSeries {
        self.series(self.response.clone(), "response")
    }

    pub fn control_series(&self) -> TimeSeries {
        self.series(self.control.clone(), "control")
    }

    pub fn observable(&self, label: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v.as_slice())
    }

    fn series(&self, values: Vec<f64>, label: &str) -> TimeSeries {
        TimeSeries::new(0.0, self.grid.dt, values, label)
            .expect("tracking runs have at least one step")
    }
}

/// Relative RMS residual of a tracking run over the pulse window.
pub fn tracking_residual(result: &TrackingResult) -> Residual {
    relative_rms(&result.response, &result.target)
}

/// Drive `system` with the bare pulse and record its response.
pub fn run_open_loop<S: DrivenSystem>(
    system: &mut S,
    pulse: &PulseSpec,
    grid: TimeGrid,
) -> Result<TrackingResult> {
    let config = FeedbackConfig::with_gain(0.0);
    drive(system, None, pulse, grid, &config)
}

/// Run the closed loop against a reference response sampled on `grid`.
pub fn run_tracking<S: DrivenSystem>(
    system: &mut S,
    reference: &TimeSeries,
    pulse: &PulseSpec,
    grid: TimeGrid,
    config: &FeedbackConfig,
) -> Result<TrackingResult> {
    config.validate()?;
    if reference.len() != grid.samples()
        || reference.start().abs() > 1e-12 * grid.dt
        || (reference.step() - grid.dt).abs() > 1e-12 * grid.dt
    {
        return Err(Error::GridMismatch(format!(
            "reference has {} samples from t = {} every {}, propagation grid has {} every {}",
            reference.len(),
            reference.start(),
            reference.step(),
            grid.samples(),
            grid.dt
        )));
    }
    drive(system, Some(reference.values()), pulse, grid, config)
}

fn drive<S: DrivenSystem>(
    system: &mut S,
    target: Option<&[f64]>,
    pulse: &PulseSpec,
    grid: TimeGrid,
    config: &FeedbackConfig,
) -> Result<TrackingResult> {
    let samples = grid.samples();
    let labels = system.observable_labels();
    let mut result = TrackingResult {
        grid,
        gain: config.gain,
        response: Vec::with_capacity(samples),
        target: Vec::with_capacity(samples),
        control: Vec::with_capacity(samples),
        total_field: Vec::with_capacity(samples),
        residual: Vec::with_capacity(samples),
        guard: Vec::with_capacity(samples),
        observables: labels
            .iter()
            .map(|&l| (l, Vec::with_capacity(samples)))
            .collect(),
    };

    let mut previous = 0.0;
    for n in 0..samples {
        let t = grid.time(n);
        let tl = pulse.field(t);
        let parts = system.response_parts()?;
        let y = target.map_or(0.0, |y| y[n]);
        let outcome = control_field(
            parts,
            tl,
            y,
            config.gain,
            config.guard_threshold,
            previous,
        );
        let u = outcome.value;
        let response = parts.response(tl + u);

        result.response.push(response);
        result.target.push(y);
        result.control.push(u);
        result.total_field.push(tl + u);
        result.residual.push(response - y);
        result.guard.push(outcome.guard_tripped);
        for ((_, column), value) in result.observables.iter_mut().zip(system.observables()?) {
            column.push(value);
        }

        if n < grid.steps {
            let window = FieldWindow {
                start: t,
                dt: grid.dt,
                tl_start: tl,
                tl_mid: pulse.field(t + 0.5 * grid.dt),
                tl_end: pulse.field(grid.time(n + 1)),
                control: u,
            };
            system.advance(&window)?;
        }
        previous = u;
    }
    Ok(result)
}
