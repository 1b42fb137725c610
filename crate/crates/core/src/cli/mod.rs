//! Configuration, `--set` overrides and experiment dispatch behind the
//! command-line driver.

mod config;
mod dispatch;
mod overrides;

pub use config::{
    load_config, normalized, parse_config, BourgainScanKind, BourgainSection, EnsembleSection, Experiment, FieldSpec,
    MultilinearSection, PicardSection, ResidualSection, ResonanceSection, RunConfig, MAX_KMAX,
};
pub use dispatch::{dispatch, Outcome, SUBLINEAR_FROM_K};
pub use overrides::apply_override;
