//! Proportional-feedback tracking of quantum responses.
//!
//! A reference system is driven by a transform-limited pulse and its response
//! `Y(t) = d<O>/dt` is recorded. A second, different system is then driven by
//! the same pulse plus a feedback field `u = k_p (d<O>_dr/dt - Y)`, which the
//! Ehrenfest theorem turns into a closed-form, explicitly computable control
//! law. Two platforms are provided:
//!
//! * [`grid`]: a 1D single-active-electron atom (soft-Coulomb core, length
//!   gauge, split-operator propagation), tracked through `<p>`.
//! * [`lattice`]: a periodic Fermi-Hubbard ring with a Peierls phase, solved
//!   by exact diagonalization in a fixed `(N_up, N_down)` sector and tracked
//!   through the current `<J>`.
//!
//! [`pulse`] holds the driving field and strong-field scaling laws,
//! [`feedback`] the controller and tracking loop, and [`spectrum`] the
//! harmonic analysis of recorded responses.

pub mod error;
pub mod feedback;
pub mod grid;
pub mod lattice;
pub mod presets;
pub mod pulse;
pub mod series;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use feedback::{
    DrivenSystem, FeedbackConfig, FieldWindow, ResponseParts, TimeGrid, TrackingResult,
};
pub use pulse::{AtomSpec, PulseSpec, StrongFieldScales};
pub use series::TimeSeries;
