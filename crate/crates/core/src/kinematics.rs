//! Ballistic fall from the MOT to the cavity mode.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::math;
use crate::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Mass of a ¹³³Cs atom, kg.
pub const CESIUM_MASS: f64 = 2.20695e-25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallConfig {
    /// MOT centre to mode centre, m.
    pub drop_height: f64,
    /// m/s².
    pub gravity: f64,
    /// Standard deviation of the arrival-time measurement, s. Zero disables it.
    pub timing_jitter: f64,
}

impl Default for FallConfig {
    fn default() -> Self {
        FallConfig {
            drop_height: 5e-3,
            gravity: 9.81,
            timing_jitter: 0.0,
        }
    }
}

impl FallConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.drop_height > 0.0 && self.drop_height.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "drop_height",
                reason: "must be positive",
            });
        }
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gravity",
                reason: "must be positive",
            });
        }
        if !(self.timing_jitter >= 0.0 && self.timing_jitter.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "timing_jitter",
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    /// Free-fall time from rest, s.
    pub fn rest_fall_time(&self) -> f64 {
        math::sqrt(2.0 * self.drop_height / self.gravity)
    }
}

/// A straight, constant-speed transit through the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    /// Horizontal off-axis offset, μm.
    pub y_off: f64,
    /// Vertical speed at the mode, m/s.
    pub v: f64,
    /// Time at which the atom crosses `x = 0`, s.
    pub t_c: f64,
    /// Axial position relative to an antinode, nm.
    pub z_pos: f64,
}

impl Trajectory {
    pub fn new(y_off: f64, v: f64, t_c: f64) -> Self {
        Trajectory {
            y_off,
            v,
            t_c,
            z_pos: 0.0,
        }
    }

    /// `v > 0` and `|z_pos| ≤ λ/4` for wavelength `lambda_nm`.
    pub fn validate(&self, lambda_nm: f64) -> Result<()> {
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "v",
                reason: "speed must be positive",
            });
        }
        if !self.y_off.is_finite() || !self.t_c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                reason: "offset and crossing time must be finite",
            });
        }
        if !(self.z_pos.abs() <= lambda_nm / 4.0) {
            return Err(Error::InvalidParameter {
                name: "z_pos",
                reason: "must lie within a quarter wavelength of the antinode",
            });
        }
        Ok(())
    }
}

/// Vertical position in μm at time `t` (s).
#[inline]
pub fn x_at(tr: &Trajectory, t: f64) -> f64 {
    tr.v * (t - tr.t_c) * 1e6
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleRecord {
    /// Initial vertical velocity at the MOT, m/s, positive downward.
    pub v0: f64,
    /// Arrival time at the mode, ms.
    pub t_arr: f64,
    /// Speed at the mode, m/s.
    pub v_arr: f64,
}

/// Arrival time (ms) and speed (m/s) for an atom released with vertical
/// velocity `v0` (positive downward).
pub fn arrival_from_initial(fc: &FallConfig, v0: f64) -> (f64, f64) {
    let v_arr = math::sqrt(v0 * v0 + 2.0 * fc.gravity * fc.drop_height);
    let t_arr = (v_arr - v0) / fc.gravity;
    (t_arr * 1e3, v_arr)
}

/// Draws `n` atoms from a 1D Maxwell-Boltzmann velocity distribution and
/// propagates them to the mode.
///
/// Record `i` uses its own ChaCha stream, so the output does not depend on
/// how the index range is split across workers.
pub fn sample_ensemble(
    fc: &FallConfig,
    temperature: f64,
    atom_mass: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<EnsembleRecord>> {
    fc.validate()?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            reason: "must be positive",
        });
    }
    if !(atom_mass > 0.0 && atom_mass.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "atom_mass",
            reason: "must be positive",
        });
    }
    if n == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let sigma = math::sqrt(BOLTZMANN * temperature / atom_mass);
    let velocity = Normal::new(0.0, sigma).map_err(|_| Error::InvalidParameter {
        name: "temperature",
        reason: "velocity spread is not finite",
    })?;
    let jitter = Normal::new(0.0, fc.timing_jitter * 1e3).map_err(|_| Error::InvalidParameter {
        name: "timing_jitter",
        reason: "must be finite",
    })?;
    Ok((0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let v0 = velocity.sample(&mut rng);
            let (mut t_arr, v_arr) = arrival_from_initial(fc, v0);
            if fc.timing_jitter > 0.0 {
                t_arr += jitter.sample(&mut rng);
            }
            EnsembleRecord { v0, t_arr, v_arr }
        })
        .collect())
}
