//! Forward model and inference for single atoms falling through a tilted
//! Hermite-Gaussian cavity mode.
//!
//! The crate is `no_std` (it needs `alloc` for traces and ensembles) and is
//! organised bottom-up:
//!
//! - [`mode`]: Hermite-Gaussian mode functions, tilt rotation, effective coupling.
//! - [`transmission`]: weak-field cavity transmission and position/detuning scans.
//! - [`kinematics`]: ballistic fall from the MOT, thermal ensembles.
//! - [`detector`]: binned expected transmission and Poisson photon counts.
//! - [`reconstruct`]: Poisson maximum-likelihood trajectory fitting and the
//!   symmetry (degeneracy) analysis.
//! - [`thermometry`]: arrival-speed V-curve and temperature estimate.
//!
//! All rates are carried as ordinary frequencies ν = ω/2π in MHz. The
//! transmission is homogeneous of degree zero in the rates, so this is
//! equivalent to working in angular units.
#![no_std]
// `!(a > b)` rejects NaN along with the failing comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod math;

pub mod detector;
pub mod kinematics;
pub mod mode;
pub mod reconstruct;
pub mod simplex;
pub mod thermometry;
pub mod transmission;

pub use error::{Error, Result};

pub use detector::{expected_trace, sample_counts, DetectorConfig, TransitTrace};
pub use kinematics::{
    arrival_from_initial, sample_ensemble, x_at, EnsembleRecord, FallConfig, Trajectory, BOLTZMANN,
    CESIUM_MASS,
};
pub use mode::{
    effective_coupling, hermite, lab_to_mode, mode_amplitude_3d, mode_to_lab, relative_amplitude,
    LabPoint, ModeGeometry, ModeIndex, ModePoint,
};
pub use reconstruct::{
    degeneracy_scan, fit_transit, log_likelihood, x_resolution, DegeneracyReport, FitOptions,
    FitParams, FitResult, Symmetry,
};
pub use thermometry::{estimate_temperature, v_shape_curve, TemperatureEstimate};
pub use transmission::{
    coupling_detuning_scan, detuning_scan, position_scan, transmission_at, DetuningConvention,
    Detunings, Rates, SystemConfig,
};
