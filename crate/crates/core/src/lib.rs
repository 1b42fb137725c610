//! Spectral simulation and verification toolkit for the weakly damped, forced
//! Kawahara equation on the torus.

pub mod bourgain;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod normal_form;
pub mod params;
pub mod resonance;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use params::{ExactParams, PhysicalParams};
pub use spectral::{random_field, ConvolutionMode, SpectralField};
