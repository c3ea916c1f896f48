//! Time-binned transmission traces and photon-counting noise.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::kinematics::{x_at, Trajectory};
use crate::mode::LabPoint;
use crate::transmission::SystemConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Bin width, μs.
    pub bin_width: f64,
    /// Detected count rate for `T = 1`, counts/s.
    pub flux0: f64,
    /// Background count rate, counts/s.
    pub background: f64,
    /// Trace extent relative to the crossing time, μs. `window.0 < 0 < window.1`.
    pub window: (f64, f64),
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            bin_width: 10.0,
            flux0: 5e6,
            background: 0.0,
            window: (-300.0, 300.0),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "bin_width",
                reason: "must be positive",
            });
        }
        if !(self.flux0 >= 0.0 && self.flux0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "flux0",
                reason: "must be non-negative",
            });
        }
        if !(self.background >= 0.0 && self.background.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "background",
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    /// Bin width in seconds.
    pub fn bin_seconds(&self) -> f64 {
        self.bin_width * 1e-6
    }

    /// Expected counts in one bin for transmission `t`.
    #[inline]
    pub fn mean_counts(&self, t: f64) -> f64 {
        (self.flux0 * t + self.background) * self.bin_seconds()
    }
}

/// Binned transit record. `counts` is empty until [`sample_counts`] fills it
/// (or a measured trace is loaded).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitTrace {
    /// Bin-centre times, s.
    pub t: Vec<f64>,
    pub expected_t: Vec<f64>,
    pub counts: Vec<u64>,
}

impl TransitTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn has_counts(&self) -> bool {
        !self.counts.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.expected_t.len() != self.t.len()
            || (!self.counts.is_empty() && self.counts.len() != self.t.len())
        {
            return Err(Error::LengthMismatch);
        }
        Ok(())
    }
}

/// Transmission at the given bin-centre times (s) for a trajectory.
pub fn transmission_at_times(
    cfg: &SystemConfig,
    tr: &Trajectory,
    times: &[f64],
) -> Result<Vec<f64>> {
    let eval = cfg.evaluator();
    times
        .iter()
        .map(|&t| eval.transmission(LabPoint::new(x_at(tr, t), tr.y_off, tr.z_pos)))
        .collect()
}

/// Bin-centre times covering the detector window around `t_c`.
pub fn bin_centers(det: &DetectorConfig, t_c: f64) -> Result<Vec<f64>> {
    det.validate()?;
    let (start, end) = det.window;
    if !(start < 0.0 && end > 0.0) || !start.is_finite() || !end.is_finite() {
        return Err(Error::DegenerateWindow);
    }
    let n = libm::floor((end - start) / det.bin_width + 1e-9) as usize;
    if n == 0 {
        return Err(Error::DegenerateWindow);
    }
    let bw = det.bin_seconds();
    let t0 = t_c + start * 1e-6;
    Ok((0..n).map(|i| t0 + (i as f64 + 0.5) * bw).collect())
}

/// Expected transmission sampled at bin centres over the detector window.
pub fn expected_trace(
    cfg: &SystemConfig,
    tr: &Trajectory,
    det: &DetectorConfig,
) -> Result<TransitTrace> {
    cfg.validate()?;
    tr.validate(cfg.geometry.lambda)?;
    let t = bin_centers(det, tr.t_c)?;
    let expected_t = transmission_at_times(cfg, tr, &t)?;
    Ok(TransitTrace {
        t,
        expected_t,
        counts: Vec::new(),
    })
}

/// Fills `counts` with Poisson draws of mean `(flux0·T + background)·bin_width`.
/// Bins are drawn in order from one ChaCha stream seeded by `seed`.
pub fn sample_counts(
    trace: &TransitTrace,
    det: &DetectorConfig,
    seed: u64,
) -> Result<TransitTrace> {
    det.validate()?;
    if trace.expected_t.len() != trace.t.len() {
        return Err(Error::LengthMismatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = trace
        .expected_t
        .iter()
        .map(|&t| {
            let lambda = det.mean_counts(t);
            if lambda > 0.0 {
                // rand_distr returns whole numbers as f64
                Poisson::new(lambda)
                    .map(|p| p.sample(&mut rng) as u64)
                    .map_err(|_| Error::InvalidParameter {
                        name: "flux0",
                        reason: "Poisson mean is not finite",
                    })
            } else {
                Ok(0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitTrace {
        t: trace.t.clone(),
        expected_t: trace.expected_t.clone(),
        counts,
    })
}

/// Largest absolute difference between two equally long sequences.
pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
