//! Exact integer arithmetic around the dispersion relation: telescoping
//! identities, phase functions, resonant-triple classes, `A_{p,q}` counting
//! and gap statistics.

mod gaps;
mod identities;
mod table;

pub use gaps::{gamma_delta, gamma_gap_stats, GapReport, GAP_RATIO_FLOOR};
pub use identities::{
    classify_resonant_triple, four_phase_factorization_check, four_phase_sides, kappa, kappa_scaled, pow_i128,
    quintic_identity_check, theta, FourPhaseSides, TripleClass,
};
pub use table::{
    dyadic_shell, dyadic_sweep, enumerate_apq, shell_values, sweep_csv, PqKey, ResonanceTable, SweepRow,
};
