//! Desk-scale numerical studies: absorbing ball, smoothing of the nonlinear
//! part, and ensemble approach to the attractor.

mod report;
mod runs;

pub(crate) use report::sha256_hex;
pub use report::{Assertion, ExperimentReport, InputSummary, Provenance, TimeSeries};
pub use runs::{
    final_log_slope, run_absorbing_ball, run_attractor_ensemble, run_smoothing, BALL_GRACE, CONTRAST_MIN,
    ENVELOPE_SLACK, PLATEAU_SLOPE_MAX, RADIUS_AGREEMENT, RECORDED_SAMPLES, ROUGHNESS_MIN, ZERO_FORCING_RADIUS,
};
