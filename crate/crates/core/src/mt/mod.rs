//! Moser–Trudinger constants, sharpness sweeps and concentration profiles.

mod concentration;
mod constants;
mod onofri;
mod sweep;

pub use concentration::{concentration_profile, default_attribution_radius, Atom, ConcentrationReport};
pub use constants::{moser_trudinger_a, mt_constants, onofri_alpha, MTConstants};
pub use onofri::onofri_gap;
pub use sweep::{sharpness_sweep, SweepReport, SweepRow, CSV_COLUMNS, DEFAULT_EPS};
