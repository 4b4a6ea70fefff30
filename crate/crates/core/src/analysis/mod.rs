//! Measurements on generated sets: evenness, the outward push, cap counts,
//! bound ratios, shell structure, exponent fits and parameter sweeps.

mod bounds;
mod evenness;
mod fit;
mod push;
mod shells;
mod sweep;

pub use bounds::{cap_count, check_bounds, max_cap_sampled, BoundsReport, CapEstimate};
pub use evenness::evenness_alpha;
pub use fit::{
    exponent_closed_form, exponent_by_recurrence, fit_exponent, fit_exponent_with,
    theoretical_exponent, FitResult, DEFAULT_DISCARD,
};
pub use push::{outer_normal, outward_push};
pub use shells::{check_shells, ShellReport, CAP_DIRECTIONS};
pub use sweep::{
    lower_band, measure, run_sweep, top_decade, upper_band, BandCheck, SweepRecord, SweepRow,
};
