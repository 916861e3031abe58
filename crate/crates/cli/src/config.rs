//! Experiment configuration files.
//!
//! Configs are TOML. The top-level `platform` key selects the schema; every
//! other key has a default, and unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use imposter::feedback::FeedbackConfig;
use imposter::grid::{AbsorberSpec, AtomNumerics, Grid1D, RelaxOptions};
use imposter::lattice::{HubbardNumerics, KrylovOptions, LanczosOptions, LatticeModel};
use imposter::presets::{self, LATTICE_RING};
use imposter::{AtomSpec, PulseSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Atom,
    Hubbard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackSection {
    #[serde(default = "default_gain")]
    pub gain: f64,
    #[serde(default = "default_guard")]
    pub guard_threshold: f64,
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    /// Relative RMS residual above which `run-tracking` fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<f64>,
}

fn default_gain() -> f64 {
    presets::DEFAULT_GAIN
}

fn default_guard() -> f64 {
    FeedbackConfig::default().guard_threshold
}

fn default_stride() -> usize {
    1
}

impl Default for FeedbackSection {
    fn default() -> Self {
        Self {
            gain: default_gain(),
            guard_threshold: default_guard(),
            output_stride: default_stride(),
            gate: None,
        }
    }
}

impl FeedbackSection {
    pub fn to_config(&self) -> CliResult<FeedbackConfig> {
        let config = FeedbackConfig {
            gain: self.gain,
            guard_threshold: self.guard_threshold,
            output_stride: self.output_stride,
        };
        config.validate()?;
        if let Some(gate) = self.gate {
            if !(gate > 0.0) {
                return Err(CliError::invalid("feedback.gate", format!("must be > 0, got {gate}")));
            }
        }
        Ok(config)
    }
}

// ---- atom ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomPulse {
    /// Carrier frequency in a.u.
    #[serde(default = "atom_omega")]
    pub omega: f64,
    /// Peak field in a.u.
    #[serde(default = "atom_field")]
    pub field: f64,
    #[serde(default = "atom_cycles")]
    pub cycles: u32,
}

fn atom_omega() -> f64 {
    presets::ATOM_OMEGA
}

fn atom_field() -> f64 {
    presets::ATOM_FIELD
}

fn atom_cycles() -> u32 {
    presets::ATOM_CYCLES
}

impl Default for AtomPulse {
    fn default() -> Self {
        Self {
            omega: atom_omega(),
            field: atom_field(),
            cycles: atom_cycles(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub ionization_potential: f64,
    /// Soft-core parameter; calibrated against `ionization_potential` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub softening: Option<f64>,
}

fn argon() -> AtomSection {
    AtomSection {
        ionization_potential: presets::ARGON_IP,
        softening: None,
    }
}

fn hydrogen() -> AtomSection {
    AtomSection {
        ionization_potential: presets::HYDROGEN_IP,
        softening: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomNumericsSection {
    #[serde(default = "half_width")]
    pub half_width: f64,
    #[serde(default = "points")]
    pub points: usize,
    #[serde(default = "atom_dt")]
    pub dt: f64,
    #[serde(default = "absorber_fraction")]
    pub absorber_fraction: f64,
    #[serde(default = "absorber_exponent")]
    pub absorber_exponent: f64,
}

fn half_width() -> f64 {
    AtomNumerics::default().grid.half_width()
}

fn points() -> usize {
    AtomNumerics::default().grid.points()
}

fn atom_dt() -> f64 {
    AtomNumerics::default().dt
}

fn absorber_fraction() -> f64 {
    AbsorberSpec::default().fraction
}

fn absorber_exponent() -> f64 {
    AbsorberSpec::default().exponent
}

impl Default for AtomNumericsSection {
    fn default() -> Self {
        Self {
            half_width: half_width(),
            points: points(),
            dt: atom_dt(),
            absorber_fraction: absorber_fraction(),
            absorber_exponent: absorber_exponent(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub platform: Platform,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub pulse: AtomPulse,
    #[serde(default = "argon")]
    pub reference: AtomSection,
    #[serde(default = "hydrogen")]
    pub driven: AtomSection,
    #[serde(default)]
    pub feedback: FeedbackSection,
    #[serde(default)]
    pub numerics: AtomNumericsSection,
}

impl AtomConfig {
    pub fn pulse(&self) -> CliResult<PulseSpec> {
        Ok(PulseSpec::new(self.pulse.field, self.pulse.omega, self.pulse.cycles)?)
    }

    pub fn numerics(&self) -> CliResult<AtomNumerics> {
        let n = &self.numerics;
        let absorber = AbsorberSpec {
            fraction: n.absorber_fraction,
            exponent: n.absorber_exponent,
        };
        absorber.validate()?;
        if !(n.dt > 0.0) {
            return Err(CliError::invalid("numerics.dt", format!("must be > 0, got {}", n.dt)));
        }
        Ok(AtomNumerics {
            grid: Grid1D::new(n.half_width, n.points)?,
            dt: n.dt,
            absorber,
            relax: RelaxOptions::default(),
        })
    }

    /// Fill in calibrated softenings so the echoed config re-runs exactly.
    pub fn resolve_atoms(&mut self) -> CliResult<(AtomSpec, AtomSpec)> {
        let grid = self.numerics()?.grid;
        let resolve = |section: &mut AtomSection| -> CliResult<AtomSpec> {
            let atom = match section.softening {
                Some(alpha) => AtomSpec::new(section.ionization_potential, alpha)?,
                None => presets::calibrated_atom(section.ionization_potential, &grid)?,
            };
            section.softening = Some(atom.softening);
            Ok(atom)
        };
        let reference = resolve(&mut self.reference)?;
        let driven = resolve(&mut self.driven)?;
        Ok((reference, driven))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.pulse()?;
        self.numerics()?;
        self.feedback.to_config()?;
        for (key, section) in [("reference", &self.reference), ("driven", &self.driven)] {
            if !(section.ionization_potential > 0.0) {
                return Err(CliError::invalid(
                    &format!("{key}.ionization_potential"),
                    format!("must be > 0, got {}", section.ionization_potential),
                ));
            }
            if let Some(alpha) = section.softening {
                AtomSpec::new(section.ionization_potential, alpha)?;
            }
        }
        Ok(())
    }
}

// ---- hubbard ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(default = "sites")]
    pub sites: usize,
    /// Defaults to half filling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_up: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_down: Option<usize>,
    #[serde(default = "hopping_ev")]
    pub hopping_ev: f64,
    #[serde(default = "spacing_angstrom")]
    pub spacing_angstrom: f64,
}

fn sites() -> usize {
    LATTICE_RING.sites
}

fn hopping_ev() -> f64 {
    LATTICE_RING.hopping_ev
}

fn spacing_angstrom() -> f64 {
    LATTICE_RING.spacing_angstrom
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            sites: sites(),
            n_up: None,
            n_down: None,
            hopping_ev: hopping_ev(),
            spacing_angstrom: spacing_angstrom(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticePulse {
    #[serde(default = "frequency_thz")]
    pub frequency_thz: f64,
    #[serde(default = "field_mv_per_cm")]
    pub field_mv_per_cm: f64,
    #[serde(default = "lattice_cycles")]
    pub cycles: u32,
}

fn frequency_thz() -> f64 {
    LATTICE_RING.frequency_thz
}

fn field_mv_per_cm() -> f64 {
    LATTICE_RING.field_mv_per_cm
}

fn lattice_cycles() -> u32 {
    LATTICE_RING.cycles
}

impl Default for LatticePulse {
    fn default() -> Self {
        Self {
            frequency_thz: frequency_thz(),
            field_mv_per_cm: field_mv_per_cm(),
            cycles: lattice_cycles(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSection {
    /// On-site interaction in units of the hopping.
    pub u_over_t0: f64,
}

fn u_reference() -> InteractionSection {
    InteractionSection {
        u_over_t0: LATTICE_RING.u_reference,
    }
}

fn u_driven() -> InteractionSection {
    InteractionSection {
        u_over_t0: LATTICE_RING.u_driven,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubbardNumericsSection {
    #[serde(default = "lattice_dt")]
    pub dt: f64,
    #[serde(default = "krylov_dim")]
    pub krylov_dim: usize,
    #[serde(default = "krylov_tolerance")]
    pub krylov_tolerance: f64,
    #[serde(default = "lanczos_subspace")]
    pub lanczos_subspace: usize,
    #[serde(default = "lanczos_tolerance")]
    pub lanczos_tolerance: f64,
    #[serde(default = "lanczos_restarts")]
    pub lanczos_max_restarts: usize,
}

fn lattice_dt() -> f64 {
    HubbardNumerics::default().dt
}

fn krylov_dim() -> usize {
    KrylovOptions::default().max_dim
}

fn krylov_tolerance() -> f64 {
    KrylovOptions::default().tolerance
}

fn lanczos_subspace() -> usize {
    LanczosOptions::default().subspace
}

fn lanczos_tolerance() -> f64 {
    LanczosOptions::default().tolerance
}

fn lanczos_restarts() -> usize {
    LanczosOptions::default().max_restarts
}

impl Default for HubbardNumericsSection {
    fn default() -> Self {
        Self {
            dt: lattice_dt(),
            krylov_dim: krylov_dim(),
            krylov_tolerance: krylov_tolerance(),
            lanczos_subspace: lanczos_subspace(),
            lanczos_tolerance: lanczos_tolerance(),
            lanczos_max_restarts: lanczos_restarts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubbardConfig {
    pub platform: Platform,
    /// Seed of the Lanczos start vector.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub pulse: LatticePulse,
    #[serde(default = "u_reference")]
    pub reference: InteractionSection,
    #[serde(default = "u_driven")]
    pub driven: InteractionSection,
    #[serde(default)]
    pub feedback: FeedbackSection,
    #[serde(default)]
    pub numerics: HubbardNumericsSection,
}

impl HubbardConfig {
    pub fn experiment(&self) -> presets::LatticeExperiment {
        let l = &self.lattice;
        presets::LatticeExperiment {
            sites: l.sites,
            n_up: l.n_up.unwrap_or(l.sites / 2),
            n_down: l.n_down.unwrap_or(l.sites / 2),
            hopping_ev: l.hopping_ev,
            spacing_angstrom: l.spacing_angstrom,
            frequency_thz: self.pulse.frequency_thz,
            field_mv_per_cm: self.pulse.field_mv_per_cm,
            cycles: self.pulse.cycles,
            u_reference: self.reference.u_over_t0,
            u_driven: self.driven.u_over_t0,
        }
    }

    pub fn pulse(&self) -> CliResult<PulseSpec> {
        let p = &self.pulse;
        for (key, value) in [
            ("pulse.frequency_thz", p.frequency_thz),
            ("pulse.field_mv_per_cm", p.field_mv_per_cm),
            ("lattice.hopping_ev", self.lattice.hopping_ev),
            ("lattice.spacing_angstrom", self.lattice.spacing_angstrom),
        ] {
            let ok = if key == "pulse.field_mv_per_cm" { value >= 0.0 } else { value > 0.0 };
            if !ok || !value.is_finite() {
                let bound = if key == "pulse.field_mv_per_cm" { ">= 0" } else { "> 0" };
                return Err(CliError::invalid(key, format!("must be {bound}, got {value}")));
            }
        }
        Ok(self.experiment().pulse()?)
    }

    pub fn models(&self) -> CliResult<(LatticeModel, LatticeModel)> {
        let e = self.experiment();
        Ok((e.reference_model()?, e.driven_model()?))
    }

    pub fn numerics(&self) -> CliResult<HubbardNumerics> {
        let n = &self.numerics;
        if !(n.dt > 0.0) {
            return Err(CliError::invalid("numerics.dt", format!("must be > 0, got {}", n.dt)));
        }
        if n.krylov_dim == 0 {
            return Err(CliError::invalid("numerics.krylov_dim", "must be >= 1".into()));
        }
        Ok(HubbardNumerics {
            dt: n.dt,
            krylov: KrylovOptions {
                max_dim: n.krylov_dim,
                tolerance: n.krylov_tolerance,
            },
            lanczos: LanczosOptions {
                subspace: n.lanczos_subspace,
                tolerance: n.lanczos_tolerance,
                max_restarts: n.lanczos_max_restarts,
                seed: self.seed,
            },
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        self.pulse()?;
        self.models()?;
        self.numerics()?;
        self.feedback.to_config()?;
        let e = self.experiment();
        imposter::lattice::build_sector_basis(e.sites, e.n_up, e.n_down)?;
        Ok(())
    }

    /// Make half-filling defaults explicit.
    pub fn resolve(&mut self) {
        let e = self.experiment();
        self.lattice.n_up = Some(e.n_up);
        self.lattice.n_down = Some(e.n_down);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Atom(AtomConfig),
    Hubbard(HubbardConfig),
}

#[derive(Deserialize)]
struct Probe {
    platform: Option<toml::Value>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let probe: Probe = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let platform = match probe.platform {
            None => return Err(CliError::invalid("platform", "missing (expected \"atom\" or \"hubbard\")".into())),
            Some(toml::Value::String(s)) => s,
            Some(other) => {
                return Err(CliError::invalid("platform", format!("expected a string, got {other}")))
            }
        };
        let config = match platform.as_str() {
            "atom" => Self::Atom(toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?),
            "hubbard" => {
                Self::Hubbard(toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?)
            }
            other => {
                return Err(CliError::invalid(
                    "platform",
                    format!("expected \"atom\" or \"hubbard\", got \"{other}\""),
                ))
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        match self {
            Self::Atom(c) => c.validate(),
            Self::Hubbard(c) => c.validate(),
        }
    }

    pub fn platform(&self) -> Platform {
        match self {
            Self::Atom(_) => Platform::Atom,
            Self::Hubbard(_) => Platform::Hubbard,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Atom(c) => c.seed,
            Self::Hubbard(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Atom(c) => c.seed = seed,
            Self::Hubbard(c) => c.seed = seed,
        }
    }

    pub fn output_dir(&self) -> Option<&Path> {
        match self {
            Self::Atom(c) => c.output_dir.as_deref(),
            Self::Hubbard(c) => c.output_dir.as_deref(),
        }
    }

    pub fn feedback(&self) -> &FeedbackSection {
        match self {
            Self::Atom(c) => &c.feedback,
            Self::Hubbard(c) => &c.feedback,
        }
    }

    pub fn feedback_mut(&mut self) -> &mut FeedbackSection {
        match self {
            Self::Atom(c) => &mut c.feedback,
            Self::Hubbard(c) => &mut c.feedback,
        }
    }

    /// Carrier frequency in program units.
    pub fn omega(&self) -> CliResult<f64> {
        Ok(match self {
            Self::Atom(c) => c.pulse()?.omega(),
            Self::Hubbard(c) => c.pulse()?.omega(),
        })
    }

    /// Fully materialized TOML text.
    pub fn to_toml(&self) -> String {
        let text = match self {
            Self::Atom(c) => toml::to_string(c),
            Self::Hubbard(c) => toml::to_string(c),
        };
        text.expect("configs always serialize")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let value = match self {
            Self::Atom(c) => serde_json::to_value(c),
            Self::Hubbard(c) => serde_json::to_value(c),
        };
        value.expect("configs always serialize")
    }
}
