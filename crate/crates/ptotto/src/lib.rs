//! Single-bath, measurement-fueled quantum thermal machine with a
//! deformation-structured bath.

pub mod analytic;
pub mod bath;
pub mod cycle;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod math;
pub mod params;
pub mod pt;
pub mod ptcheck;
pub mod report;

pub use error::{Error, Result};
pub use params::{Backend, BathOptions, CycleParams, MeasurementMode, ThermalizeMethod};
pub use report::{ComparisonReport, Regime, ThermoReport};
