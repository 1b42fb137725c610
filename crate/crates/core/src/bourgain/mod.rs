//! Discretized Bourgain-space functionals on windowed space-time samples and
//! empirical ratio scans for the bilinear, `L^4` and `L^6` estimates.

mod norms;
mod ratios;
mod sample;
mod scan;

pub use norms::{bracket, xsb_norm, ys_norm, zs_norm, LineSpectrum};
pub use ratios::{
    bilinear_ratio, derivative_product_spectrum, l4_ratio, l6_norm_exact, l6_norm_grid, l6_ratio, DENOMINATOR_B,
    MAX_L6_TIME_GRID,
};
pub use sample::{SpaceTimeSample, Window, WindowKind};
pub use scan::{
    bilinear_scan, l4_scan, l6_scan, modulation_trend, random_sample, zy_constant, ModulationTrend, SampleGrid,
    ScanKind, ScanReport, ScanRow, ZyConstant,
};
